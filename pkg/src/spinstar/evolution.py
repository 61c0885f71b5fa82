"""Unitary propagation of the angular-momentum blocks.

Two code paths live here.  ``eigendecompose`` / ``evolve_block`` /
``reduce_to_*`` are the plain dense operations on one block.
``run_trajectory`` is the production path: every block Hamiltonian is split
by the conserved parity into two halves of dimension 2j+1, each half is
diagonalised once, and observables are read off in the eigenbasis without
ever forming the evolved block density matrix.

Inside one parity half there is exactly one basis state per bath index k
(flipping the central spin flips the parity), which is what makes the
bath reduced state cheap: for initial states diagonal in (up, down) it
splits into an even-k and an odd-k part.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from ._numerics import entropy_from_spectrum, gram_spectrum
from .errors import InvalidOperatorError, SectorMismatchError
from .grid import TimeGrid
from .model import (
    BlockOperator,
    BlockState,
    CentralState,
    bath_thermal_diagonal,
    build_block_hamiltonian,
    parity_diagonal,
)
from .symmetry import BlockLabel, ModelParams, sector_weights

__all__ = [
    "EigenSystem",
    "TimeGrid",
    "TrajectoryResult",
    "eigendecompose",
    "evolve_block",
    "joint_entropy_at",
    "reduce_to_bath",
    "reduce_to_central",
    "run_trajectory",
]

# central-spin matrix elements <mu|rho_S|nu> computed per sector
_CENTRAL_ENTRIES = ((0, 0), (1, 1), (1, 0))
# initial-state components below this weight cannot move an entropy by 1e-28 bits
_COLUMN_FLOOR = 1e-30
# sectors whose bath entropy can move S_B by less than this (bits) skip the bath solve
_SECTOR_ENTROPY_FLOOR = 1e-30
_PHASE_CHUNK = 512
_BATH_CHUNK_ELEMENTS = 1 << 22


@dataclass(frozen=True, eq=False)
class EigenSystem:
    label: BlockLabel
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eigendecompose(h: BlockOperator, tol: float = 1e-10) -> EigenSystem:
    """Hermitian eigendecomposition; eigenvalues ascending."""
    m = np.asarray(h.matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidOperatorError(f"operator must be square, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol * scale:
        raise InvalidOperatorError("operator is not Hermitian")
    if np.iscomplexobj(m) and not np.any(m.imag):
        m = m.real
    values, vectors = np.linalg.eigh((m + m.conj().T) / 2)
    return EigenSystem(h.label, values, vectors)


def propagator(eig: EigenSystem, t: float) -> np.ndarray:
    v = eig.eigenvectors
    return (v * np.exp(-1j * eig.eigenvalues * t)) @ v.conj().T


def evolve_block(eig: EigenSystem, state0: BlockState, t: float) -> BlockState:
    if eig.label != state0.label:
        raise SectorMismatchError(
            f"eigensystem is for two_j={eig.label.two_j}, state for two_j={state0.label.two_j}"
        )
    u = propagator(eig, t)
    rho = u @ state0.rho @ u.conj().T
    return BlockState(state0.label, (rho + rho.conj().T) / 2)


def reduce_to_central(state: BlockState) -> CentralState:
    n = state.label.bath_dim
    return CentralState(np.einsum("akbk->ab", state.rho.reshape(2, n, 2, n)))


def reduce_to_bath(state: BlockState) -> np.ndarray:
    n = state.label.bath_dim
    return np.einsum("akal->kl", state.rho.reshape(2, n, 2, n))


@dataclass(frozen=True, eq=False)
class ParityHalf:
    """One parity sector of a block: rows ordered by bath index k."""

    index: np.ndarray  # flat block-basis index of the state with bath index k
    mu: np.ndarray  # central-spin label (0 up, 1 down) of that state
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # real orthogonal


def parity_eigensystem(params: ModelParams, label: BlockLabel) -> tuple[ParityHalf, ParityHalf]:
    """Diagonalise the block separately in its two parity sectors."""
    h = build_block_hamiltonian(params, label).matrix
    parity = parity_diagonal(label, params.n_spins)
    n = label.bath_dim
    halves = []
    for sign in (1.0, -1.0):
        index = np.flatnonzero(parity == sign)
        index = index[np.argsort(index % n, kind="stable")]
        assert np.array_equal(index % n, np.arange(n))
        values, vectors = np.linalg.eigh(h[np.ix_(index, index)])
        halves.append(ParityHalf(index, index // n, values, vectors))
    return halves[0], halves[1]


@dataclass(frozen=True, eq=False)
class _SectorSeries:
    two_j: int
    central: np.ndarray  # (T, 2, 2) sector-normalized reduced central state
    bath_entropy: np.ndarray | None  # (T,) bits
    joint_entropy: float | None  # bits, time independent


def _phases(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    return np.exp(-1j * np.outer(times, values))


def _central_terms(halves, rho0):
    """Precompute M = R0_ab o (V_a^T diag(q) V_b) for each nonzero term."""
    terms = []
    for a, ha in enumerate(halves):
        for b, hb in enumerate(halves):
            r0 = ha.eigenvectors.T @ rho0[np.ix_(ha.index, hb.index)] @ hb.eigenvectors
            if not np.any(r0):
                continue
            for entry, (mu, nu) in enumerate(_CENTRAL_ENTRIES):
                q = ((ha.mu == mu) & (hb.mu == nu)).astype(float)
                if not q.any():
                    continue
                overlap = (ha.eigenvectors.T * q) @ hb.eigenvectors
                terms.append((entry, a, b, r0 * overlap))
    return terms


def _central_series(halves, rho0, times) -> np.ndarray:
    values = np.zeros((len(_CENTRAL_ENTRIES), len(times)), dtype=complex)
    terms = _central_terms(halves, rho0)
    for start in range(0, len(times), _PHASE_CHUNK):
        chunk = times[start : start + _PHASE_CHUNK]
        phases = [_phases(h.eigenvalues, chunk) for h in halves]
        for entry, a, b, m in terms:
            values[entry, start : start + len(chunk)] += np.einsum(
                "tx,tx->t", phases[a] @ m, phases[b].conj()
            )
    central = np.empty((len(times), 2, 2), dtype=complex)
    central[:, 0, 0] = values[0].real
    central[:, 1, 1] = values[1].real
    central[:, 1, 0] = values[2]
    central[:, 0, 1] = values[2].conj()
    return central


def _evolved_columns(half: ParityHalf, y: np.ndarray, chunk: np.ndarray) -> np.ndarray:
    """V diag(exp(-i lambda t)) Y for every t in ``chunk``; shape (T, n, r)."""
    arg = np.outer(chunk, half.eigenvalues)
    v = half.eigenvectors[None]
    if np.isrealobj(y):
        return (v * np.cos(arg)[:, None, :]) @ y - 1j * ((v * np.sin(arg)[:, None, :]) @ y)
    return (v * np.exp(-1j * arg)[:, None, :]) @ y


def _bath_entropy_series(halves, rho_s0: np.ndarray, bath: np.ndarray, times) -> np.ndarray:
    """Entropy (bits) of the sector-normalized bath reduced state at every time.

    The initial block state is written as Psi Psi^dagger with one column per
    (central eigenvector, bath level) pair, so the evolved bath state is a
    Gram matrix of evolved columns.
    """
    n = len(bath)
    levels = np.flatnonzero(bath > 0)
    diagonal = rho_s0[0, 1] == 0 and rho_s0[1, 0] == 0
    if diagonal:
        # columns |mu0, l>: each one lives in a single parity half
        ys = []
        for half in halves:
            rows, weights = [], []
            for mu0 in (0, 1):
                for level in levels:
                    w = rho_s0[mu0, mu0].real * bath[level]
                    if w > _COLUMN_FLOOR and half.mu[level] == mu0:
                        rows.append(level)
                        weights.append(math.sqrt(w))
            ys.append((half.eigenvectors[rows] * np.array(weights)[:, None]).T)
    else:
        q, vecs = np.linalg.eigh(rho_s0)
        ys = []
        for half in halves:
            cols = []
            for s in range(2):
                for level in levels:
                    w = q[s] * bath[level]
                    if w > _COLUMN_FLOOR:
                        psi = np.zeros(n, dtype=complex)
                        psi[level] = vecs[half.mu[level], s] * math.sqrt(w)
                        cols.append(psi)
            ys.append(half.eigenvectors.T @ np.array(cols).T)
        if not np.any(ys[0].imag) and not np.any(ys[1].imag):
            ys = [y.real for y in ys]

    if diagonal:
        return _diagonal_bath_entropy(halves, ys, times)

    r = max(y.shape[1] for y in ys)
    chunk_len = max(1, min(256, _BATH_CHUNK_ELEMENTS // max(1, n * r)))
    out = np.zeros(len(times))
    for start in range(0, len(times), chunk_len):
        chunk = times[start : start + chunk_len]
        phis = [_evolved_columns(h, y, chunk) for h, y in zip(halves, ys)]
        # row (mu, k) of the full evolved columns comes from the half holding it
        up = np.where((halves[0].mu == 0)[None, :, None], phis[0], phis[1])
        down = np.where((halves[0].mu == 1)[None, :, None], phis[0], phis[1])
        out[start : start + len(chunk)] = entropy_from_spectrum(gram_spectrum(np.concatenate([up, down], axis=2)))
    return out


def _diagonal_bath_entropy(halves, ys, times) -> np.ndarray:
    """Bath entropy for real columns; the bath state splits into even-k and odd-k blocks.

    Each half is advanced with one real GEMM per time chunk, V [cos(lt) Y | sin(lt) Y].
    """
    n = len(halves[0].index)
    order = np.concatenate([np.arange(0, n, 2), np.arange(1, n, 2)])
    n_even = (n + 1) // 2
    v_rows = [h.eigenvectors[order] for h in halves]
    widths = [y.shape[1] for y in ys]
    r = sum(widths)
    out = np.zeros(len(times))
    if r == 0:
        return out
    chunk_len = max(1, min(256, _BATH_CHUNK_ELEMENTS // max(1, 2 * n * r)))
    for start in range(0, len(times), chunk_len):
        chunk = times[start : start + chunk_len]
        parts = []
        for half, v, y in zip(halves, v_rows, ys):
            if y.shape[1] == 0:
                continue
            arg = np.outer(half.eigenvalues, chunk)[:, :, None]  # (n, T, 1)
            c = np.concatenate([np.cos(arg) * y[:, None, :], np.sin(arg) * y[:, None, :]], axis=2)
            e = (v @ c.reshape(n, -1)).reshape(n, len(chunk), 2, y.shape[1])
            parts.append(e[:, :, 0, :] - 1j * e[:, :, 1, :])
        phi = np.concatenate(parts, axis=2).transpose(1, 0, 2)  # (T, n, r), rows even k then odd k
        total = np.zeros(len(chunk))
        for rows in (slice(0, n_even), slice(n_even, n)):
            block = np.ascontiguousarray(phi[:, rows])
            if block.shape[1]:
                total += entropy_from_spectrum(gram_spectrum(block))
        out[start : start + len(chunk)] = total
    return out


def _sector_series(
    params: ModelParams, rho_s0: np.ndarray, two_j: int, times: np.ndarray, want_entropies: bool, want_bath: bool = True
):
    with threadpool_limits(limits=1):
        label = BlockLabel(two_j)
        halves = parity_eigensystem(params, label)
        bath = bath_thermal_diagonal(label, params.beta, params.omega)
        rho0 = np.kron(rho_s0, np.diag(bath))
        central = _central_series(halves, rho0, times)
        bath_entropy = joint = None
        if want_entropies:
            if want_bath:
                bath_entropy = _bath_entropy_series(halves, rho_s0, bath, times)
            else:
                bath_entropy = np.zeros(len(times))
            spectrum = np.outer(np.linalg.eigvalsh(rho_s0), bath).ravel()
            joint = float(entropy_from_spectrum(spectrum))
    return _SectorSeries(two_j, central, bath_entropy, joint)


@dataclass(frozen=True, eq=False)
class TrajectoryResult:
    """Time series of the reduced central-spin state, optionally with entropies (bits)."""

    params: ModelParams
    rho_s0: CentralState
    grid: TimeGrid
    rho_central: np.ndarray  # (n_steps, 2, 2)
    entropy_central: np.ndarray | None = None
    entropy_bath: np.ndarray | None = None
    entropy_joint: np.ndarray | None = None
    sectors: tuple[int, ...] = ()

    @property
    def has_entropies(self) -> bool:
        return self.entropy_joint is not None

    @property
    def central_states(self) -> list[CentralState]:
        return [CentralState(rho) for rho in self.rho_central]

    @property
    def probability(self) -> np.ndarray:
        return self.rho_central[:, 0, 0].real

    @property
    def coherence(self) -> np.ndarray:
        return self.rho_central[:, 1, 0]


def central_entropy_series(rho_central: np.ndarray) -> np.ndarray:
    hermitian = (rho_central + np.swapaxes(rho_central, -1, -2).conj()) / 2
    return entropy_from_spectrum(np.linalg.eigvalsh(hermitian))


def selected_sectors(params: ModelParams, weight_floor: float = 0.0):
    """(label, log_alpha, log_weight) of sectors above ``weight_floor``, ascending two_j."""
    weights = sector_weights(params)
    keep = [
        (label, la, lw)
        for label, la, lw in weights
        if lw > -math.inf and math.exp(lw) > weight_floor
    ]
    return sorted(keep, key=lambda item: item[0].two_j)


def _bath_entropy_needed(label: BlockLabel, log_weight: float) -> bool:
    bound = math.exp(log_weight) * math.log2(label.bath_dim) if label.bath_dim > 1 else 0.0
    return bound > _SECTOR_ENTROPY_FLOOR


def _mixing_entropy(sectors) -> float:
    """-sum_j w_j log2(w_j / alpha_j): entropy of the choice of block copy."""
    return float(-sum(math.exp(lw) * (lw - la) for _, la, lw in sectors) / math.log(2))


def run_trajectory(
    params: ModelParams,
    rho_s0: CentralState,
    grid: TimeGrid,
    want_entropies: bool = False,
    workers: int = 1,
    weight_floor: float = 0.0,
) -> TrajectoryResult:
    """Evolve every thermally populated sector and aggregate the central state.

    Sectors whose total weight is at most ``weight_floor`` are skipped (the
    default keeps all sectors with nonzero weight; at zero temperature only
    two_j = N survives).  Every kept sector contributes to the central state;
    the bath-entropy solve is skipped for sectors whose share of S_B is
    provably below 1e-30 bits.  Sector results are folded in ascending two_j order,
    and each sector runs with single-threaded BLAS, so the output is
    bitwise independent of ``workers``.
    """
    if not isinstance(rho_s0, CentralState):
        rho_s0 = CentralState(rho_s0)
    sectors = selected_sectors(params, weight_floor)
    times = grid.times
    rho = np.asarray(rho_s0.rho)

    def fold(results):
        central = np.zeros((len(times), 2, 2), dtype=complex)
        bath = np.zeros(len(times)) if want_entropies else None
        joint = 0.0
        for (label, _, lw), res in zip(sectors, results):
            assert res.two_j == label.two_j
            w = math.exp(lw)
            central += w * res.central
            if want_entropies:
                bath += w * res.bath_entropy
                joint += w * res.joint_entropy
        return central, bath, joint

    # S(rho_j^B) <= log2(2j+1), so w_j log2(2j+1) bounds a sector's share of S_B
    args = [
        (params, rho, label.two_j, times, want_entropies, _bath_entropy_needed(label, lw))
        for label, _, lw in sectors
    ]
    if workers <= 1 or len(args) <= 1:
        central, bath, joint = fold(_sector_series(*a) for a in args)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # largest blocks first for load balance; folded in ascending order below
            futures = {a[2]: pool.submit(_sector_series, *a) for a in sorted(args, key=lambda a: -a[2])}
            central, bath, joint = fold(futures[a[2]].result() for a in args)

    s_central = s_bath = s_joint = None
    if want_entropies:
        mixing = _mixing_entropy(sectors)
        s_central = central_entropy_series(central)
        s_bath = mixing + bath
        s_joint = np.full(len(times), mixing + joint)
    return TrajectoryResult(
        params,
        rho_s0,
        grid,
        central,
        s_central,
        s_bath,
        s_joint,
        tuple(label.two_j for label, _, _ in sectors),
    )


def joint_entropy_at(params: ModelParams, rho_s0: CentralState, t: float, weight_floor: float = 0.0) -> float:
    """S(rho_SB(t)) in bits from explicitly evolved block density matrices.

    Independent of the constant used by ``run_trajectory``; meant for
    spot-checking that the global entropy does not drift.
    """
    from .model import build_block_initial_state

    sectors = selected_sectors(params, weight_floor)
    total = _mixing_entropy(sectors)
    for label, _, lw in sectors:
        eig = eigendecompose(build_block_hamiltonian(params, label))
        state = evolve_block(eig, build_block_initial_state(params, rho_s0, label), t)
        total += math.exp(lw) * float(entropy_from_spectrum(np.linalg.eigvalsh(state.rho)))
    return total
