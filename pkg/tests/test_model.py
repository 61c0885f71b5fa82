import numpy as np
import pytest

from spinstar.errors import InvalidStateError, ResourceLimitError
from spinstar.model import (
    CentralState,
    bath_thermal_diagonal,
    build_block_hamiltonian,
    build_full_hamiltonian,
    converged_fock_cutoff,
    parity_diagonal,
    single_mode_top_population,
)
from spinstar.symmetry import INFINITE, BlockLabel, ModelParams, allowed_two_j, degeneracy_exact


def test_central_state_constructors():
    assert np.allclose(CentralState.up().rho, [[1, 0], [0, 0]])
    assert np.allclose(CentralState.plus().rho, 0.5)
    assert CentralState.plus().dephased().is_diagonal


@pytest.mark.parametrize(
    "rho", [np.eye(2), np.diag([1.5, -0.5]), np.array([[0.5, 0.6], [0.6, 0.5]]), np.eye(3) / 3]
)
def test_central_state_rejects(rho):
    with pytest.raises(InvalidStateError):
        CentralState(rho)


def test_amplitude_norm_checked():
    with pytest.raises(InvalidStateError):
        CentralState.from_amplitudes(0.6, 0.7)
    state = CentralState.from_amplitudes(0.6, 0.8j)
    assert np.isclose(state.rho[1, 0], 0.48j)


def test_block_spectra_reassemble_full_spectrum():
    params = ModelParams(g=0.23, omega0=0.7, n_spins=5)
    full = np.linalg.eigvalsh(build_full_hamiltonian(params))
    pieces = []
    for lab in allowed_two_j(5):
        values = np.linalg.eigvalsh(build_block_hamiltonian(params, lab).matrix)
        pieces += list(values) * degeneracy_exact(5, lab)
    assert np.allclose(np.sort(pieces), full, atol=1e-12)


def test_parity_commutes():
    params = ModelParams(n_spins=6, g=0.3)
    for lab in allowed_two_j(6):
        h = build_block_hamiltonian(params, lab).matrix
        p = np.diag(parity_diagonal(lab, 6))
        assert np.allclose(h @ p, p @ h)


def test_thermal_diagonal():
    lab = BlockLabel(4)
    pops = bath_thermal_diagonal(lab, 1.0, 1.0)
    assert np.isclose(pops.sum(), 1.0)
    assert np.allclose(pops[1:] / pops[:-1], np.exp(-1.0))
    assert np.array_equal(bath_thermal_diagonal(lab, INFINITE, 1.0), [1, 0, 0, 0, 0])


def test_oracle_limit():
    with pytest.raises(ResourceLimitError):
        build_full_hamiltonian(ModelParams(n_spins=13))


def test_fock_cutoff_converged():
    params = ModelParams(n_spins=201, beta=INFINITE)
    assert single_mode_top_population(params, 60) < 1e-12
    assert converged_fock_cutoff(params, 60) == 60
