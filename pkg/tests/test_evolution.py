import numpy as np
import pytest
from scipy.linalg import expm

from spinstar.errors import InvalidOperatorError, SectorMismatchError
from spinstar.evolution import (
    eigendecompose,
    evolve_block,
    joint_entropy_at,
    parity_eigensystem,
    reduce_to_bath,
    reduce_to_central,
    run_trajectory,
)
from spinstar.grid import TimeGrid
from spinstar.model import BlockOperator, CentralState, build_block_hamiltonian, build_block_initial_state
from spinstar.symmetry import INFINITE, BlockLabel, ModelParams


def test_eigendecompose_rejects_non_hermitian():
    with pytest.raises(InvalidOperatorError):
        eigendecompose(BlockOperator(BlockLabel(0), np.array([[0.0, 1.0], [0.0, 0.0]])))


def test_evolve_block_matches_expm():
    params = ModelParams(n_spins=5, g=0.3, beta=0.7)
    lab = BlockLabel(3)
    h = build_block_hamiltonian(params, lab)
    state = build_block_initial_state(params, CentralState.plus(), lab)
    u = expm(-1j * 2.3 * h.matrix)
    evolved = evolve_block(eigendecompose(h), state, 2.3)
    assert np.allclose(evolved.rho, u @ state.rho @ u.conj().T, atol=1e-13)
    evolved.check()
    assert np.isclose(np.trace(reduce_to_bath(evolved)), 1.0)
    reduce_to_central(evolved)


def test_sector_mismatch():
    params = ModelParams(n_spins=5)
    eig = eigendecompose(build_block_hamiltonian(params, BlockLabel(3)))
    with pytest.raises(SectorMismatchError):
        evolve_block(eig, build_block_initial_state(params, CentralState.up(), BlockLabel(1)), 1.0)


def test_parity_halves_span_block():
    params = ModelParams(n_spins=7, g=0.2)
    lab = BlockLabel(5)
    even, odd = parity_eigensystem(params, lab)
    assert sorted(np.concatenate([even.index, odd.index])) == list(range(lab.block_dim))
    full = np.linalg.eigvalsh(build_block_hamiltonian(params, lab).matrix)
    assert np.allclose(np.sort(np.concatenate([even.eigenvalues, odd.eigenvalues])), full)


def _dense_reference(params, rho0, times):
    """Aggregate the central state from explicitly evolved blocks."""
    from spinstar.evolution import selected_sectors
    import math

    out = np.zeros((len(times), 2, 2), dtype=complex)
    for lab, _, lw in selected_sectors(params):
        eig = eigendecompose(build_block_hamiltonian(params, lab))
        state = build_block_initial_state(params, rho0, lab)
        for i, t in enumerate(times):
            out[i] += math.exp(lw) * reduce_to_central(evolve_block(eig, state, t)).rho
    return out


@pytest.mark.parametrize("beta", [0.0, 0.8, INFINITE])
@pytest.mark.parametrize("init", ["up", "plus"])
def test_parity_path_matches_dense_blocks(beta, init):
    params = ModelParams(n_spins=9, g=0.17, omega0=1.3, beta=beta)
    rho0 = getattr(CentralState, init)()
    grid = TimeGrid(0.37, 12)
    traj = run_trajectory(params, rho0, grid)
    assert np.allclose(traj.rho_central, _dense_reference(params, rho0, grid.times), atol=1e-12)


def test_complex_custom_state_entropies():
    params = ModelParams(n_spins=6, g=0.25, beta=0.4)
    rho0 = CentralState.from_amplitudes(0.6, 0.8j)
    traj = run_trajectory(params, rho0, TimeGrid(0.5, 8), want_entropies=True)
    assert abs(joint_entropy_at(params, rho0, 3.5) - traj.entropy_joint[0]) < 1e-10


def test_workers_bitwise_identical():
    params = ModelParams(n_spins=11, beta=0.3)
    grid = TimeGrid(0.25, 40)
    one = run_trajectory(params, CentralState.plus(), grid, want_entropies=True, workers=1)
    many = run_trajectory(params, CentralState.plus(), grid, want_entropies=True, workers=3)
    assert one.rho_central.tobytes() == many.rho_central.tobytes()
    assert one.entropy_bath.tobytes() == many.entropy_bath.tobytes()


def test_weight_floor_drops_sectors():
    params = ModelParams(n_spins=21, beta=3.0)
    full = run_trajectory(params, CentralState.up(), TimeGrid(0.5, 4))
    cut = run_trajectory(params, CentralState.up(), TimeGrid(0.5, 4), weight_floor=1e-6)
    assert len(cut.sectors) < len(full.sectors)
    assert full.sectors == tuple(sorted(full.sectors))
