"""Brute-force reference simulator on the full 2^(N+1) Hilbert space.

Nothing here uses the angular-momentum decomposition: the Hamiltonian is
built spin by spin, the bath starts in the product of single-spin Gibbs
states, and all partial traces and entropies are computed directly.

The initial state is stored as a factor Phi0 with rho(0) = Phi0 Phi0^dag
(one column per nonzero eigenvalue), and Phi(t) = U(t) Phi0 is evolved
instead of rho(t).  The joint entropy is the entropy of the spectrum of
Phi0^dag Phi0; unitary evolution leaves it unchanged, so it is computed once.
"""

from __future__ import annotations

import numpy as np

from .evolution import TrajectoryResult
from .grid import TimeGrid
from .model import DEFAULT_ORACLE_LIMIT, CentralState, build_full_hamiltonian
from .symmetry import INFINITE, ModelParams

_TIME_CHUNK = 16


def _entropy_bits(eigenvalues: np.ndarray) -> np.ndarray:
    lam = np.clip(eigenvalues, 0.0, 1.0)
    safe = np.where(lam > 0, lam, 1.0)
    return -(lam * np.log2(safe)).sum(axis=-1)


def product_thermal_bath(params: ModelParams) -> np.ndarray:
    """Diagonal of the N-spin Gibbs state, bit value 0 = up, spin 1 most significant."""
    if params.beta is INFINITE:
        single = np.array([0.0, 1.0])
    else:
        x = params.beta * params.omega / 2
        single = np.exp(np.array([-x, x]) - abs(x))
        single /= single.sum()
    diag = np.ones(1)
    for _ in range(params.n_spins):
        diag = np.kron(diag, single)
    return diag


def initial_factor(params: ModelParams, rho_s0: CentralState) -> np.ndarray:
    q, vecs = np.linalg.eigh(rho_s0.rho)
    bath = product_thermal_bath(params)
    dim_b = len(bath)
    columns = []
    for s in range(2):
        if q[s] <= 0:
            continue
        for b in np.flatnonzero(bath):
            col = np.zeros(2 * dim_b, dtype=complex)
            col[b] = vecs[0, s]
            col[dim_b + b] = vecs[1, s]
            columns.append(col * np.sqrt(q[s] * bath[b]))
    return np.array(columns).T


def run_full_trajectory(
    params: ModelParams,
    rho_s0: CentralState,
    grid: TimeGrid,
    oracle_limit: int = DEFAULT_ORACLE_LIMIT,
    want_entropies: bool = True,
) -> TrajectoryResult:
    if not isinstance(rho_s0, CentralState):
        rho_s0 = CentralState(rho_s0)
    h = build_full_hamiltonian(params, oracle_limit)
    values, vectors = np.linalg.eigh(h)
    phi0 = initial_factor(params, rho_s0)
    coeffs = vectors.T @ phi0
    dim_b = 2**params.n_spins
    times = grid.times
    rank = phi0.shape[1]

    central = np.empty((len(times), 2, 2), dtype=complex)
    s_central = np.empty(len(times)) if want_entropies else None
    s_bath = np.empty(len(times)) if want_entropies else None
    s_joint = None
    if want_entropies:
        s_joint = np.full(len(times), float(_entropy_bits(np.linalg.eigvalsh(phi0.conj().T @ phi0))))
    for start in range(0, len(times), _TIME_CHUNK):
        chunk = times[start : start + _TIME_CHUNK]
        # one real GEMM over the whole chunk: columns are (time, rank) pairs
        evolved = np.exp(-1j * np.outer(values, chunk))[:, :, None] * coeffs[:, None, :]
        flat = evolved.reshape(len(values), -1)
        re, im = np.ascontiguousarray(flat.real), np.ascontiguousarray(flat.imag)
        phi = (vectors @ re + 1j * (vectors @ im)).reshape(len(values), len(chunk), rank)
        split = np.ascontiguousarray(phi.transpose(1, 0, 2)).reshape(len(chunk), 2, dim_b, rank)
        rho_s = np.einsum("tabr,tcbr->tac", split, split.conj())
        central[start : start + len(chunk)] = rho_s
        if not want_entropies:
            continue
        s_central[start : start + len(chunk)] = _entropy_bits(np.linalg.eigvalsh(rho_s))
        # Tr_S: stack the up and down halves side by side
        bath_factor = np.concatenate([split[:, 0], split[:, 1]], axis=2)
        rho_b = bath_factor @ np.swapaxes(bath_factor, 1, 2).conj()
        s_bath[start : start + len(chunk)] = _entropy_bits(np.linalg.eigvalsh(rho_b))
    return TrajectoryResult(params, rho_s0, grid, central, s_central, s_bath, s_joint)


def full_reduced_bath(params: ModelParams, rho_s0: CentralState, t: float) -> np.ndarray:
    """Tr_S rho(t) on the 2^N bath space (diagnostic helper)."""
    h = build_full_hamiltonian(params)
    values, vectors = np.linalg.eigh(h)
    phi = vectors @ (np.exp(-1j * values * t)[:, None] * (vectors.T @ initial_factor(params, rho_s0)))
    split = phi.reshape(2, 2**params.n_spins, -1)
    return split[0] @ split[0].conj().T + split[1] @ split[1].conj().T
