"""Hamiltonians and initial states.

Block basis contract: inside sector j the flat index is
``i = mu * (2j+1) + k`` with ``mu = 0`` for the central spin up, ``mu = 1``
for down, and ``k = m + j`` (m ascending).  The full-space basis puts the
central spin on the most significant qubit, with bit value 0 meaning up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, InvalidStateError, ResourceLimitError
from .symmetry import (
    INFINITE,
    BlockLabel,
    ModelParams,
    angular_momentum_matrices,
    check_sector,
)

DEFAULT_ORACLE_LIMIT = 12
DEFAULT_FOCK_CUTOFF = 60

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])


def _check_density_matrix(rho: np.ndarray, herm_tol: float, trace_tol: float, psd_tol: float):
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidStateError("density matrix has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > herm_tol:
        raise InvalidStateError("density matrix is not Hermitian")
    trace = np.trace(rho)
    if abs(trace - 1) > trace_tol:
        raise InvalidStateError(f"density matrix trace is {trace.real:.3e}, expected 1")
    lowest = np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0]
    if lowest < -psd_tol:
        raise InvalidStateError(f"density matrix is not positive semidefinite (min eig {lowest:.3e})")


@dataclass(frozen=True, eq=False)
class CentralState:
    """Reduced 2x2 state of the central spin in the basis (up, down)."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (2, 2):
            raise InvalidStateError(f"central state must be 2x2, got {rho.shape}")
        _check_density_matrix(rho, 1e-12, 1e-12, 1e-10)
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def up(cls) -> CentralState:
        return cls(np.diag([1.0, 0.0]))

    @classmethod
    def down(cls) -> CentralState:
        return cls(np.diag([0.0, 1.0]))

    @classmethod
    def plus(cls) -> CentralState:
        return cls.from_amplitudes(1 / np.sqrt(2), 1 / np.sqrt(2))

    @classmethod
    def from_amplitudes(cls, a: complex, b: complex, tol: float = 1e-10) -> CentralState:
        """Pure state a|up> + b|down>; the norm must be 1 within ``tol``."""
        psi = np.array([a, b], dtype=complex)
        norm2 = float(np.vdot(psi, psi).real)
        if abs(norm2 - 1) > tol:
            raise InvalidStateError(f"|a|^2 + |b|^2 = {norm2!r}, expected 1")
        psi = psi / np.sqrt(norm2)
        return cls(np.outer(psi, psi.conj()))

    def dephased(self) -> CentralState:
        """Drop the coherences, keeping the populations."""
        return CentralState(np.diag(np.diag(self.rho).real))

    @property
    def is_diagonal(self) -> bool:
        return self.rho[0, 1] == 0 and self.rho[1, 0] == 0


@dataclass(frozen=True, eq=False)
class BlockOperator:
    label: BlockLabel
    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class BlockState:
    """Sector-normalized density matrix of central spin x one bath sector copy."""

    label: BlockLabel
    rho: np.ndarray

    def check(self, tol: float = 1e-12, psd_tol: float = 1e-10) -> BlockState:
        if self.rho.shape != (self.label.block_dim,) * 2:
            raise InvalidStateError(
                f"block state for two_j={self.label.two_j} must be "
                f"{self.label.block_dim}x{self.label.block_dim}, got {self.rho.shape}"
            )
        _check_density_matrix(self.rho, tol, tol, psd_tol)
        return self


def build_block_hamiltonian(params: ModelParams, label) -> BlockOperator:
    """Real symmetric sector Hamiltonian w0/2 sz + w Jz + 2g sx Jx."""
    label = check_sector(params.n_spins, label)
    jz, jx, _, _ = angular_momentum_matrices(label.two_j)
    eye = np.eye(label.bath_dim)
    h = (
        np.kron(np.diag([params.omega0 / 2, -params.omega0 / 2]), eye)
        + np.kron(np.eye(2), params.omega * jz)
        + np.kron(SIGMA_X, 2 * params.g * jx)
    )
    return BlockOperator(label, (h + h.T) / 2)


def bath_thermal_diagonal(label: BlockLabel, beta, omega: float) -> np.ndarray:
    """Populations exp(-beta w m) / Z_j over m ascending."""
    if beta is INFINITE:
        pops = np.zeros(label.bath_dim)
        pops[0] = 1.0
        return pops
    exponent = -beta * omega * label.m_values()
    pops = np.exp(exponent - exponent.max())
    return pops / pops.sum()


def build_block_initial_state(params: ModelParams, rho_s0: CentralState, label) -> BlockState:
    label = check_sector(params.n_spins, label)
    if not isinstance(rho_s0, CentralState):
        rho_s0 = CentralState(rho_s0)
    bath = bath_thermal_diagonal(label, params.beta, params.omega)
    return BlockState(label, np.kron(rho_s0.rho, np.diag(bath)))


def build_full_hamiltonian(params: ModelParams, oracle_limit: int = DEFAULT_ORACLE_LIMIT) -> np.ndarray:
    """Dense 2^(N+1) Hamiltonian built spin by spin, with no symmetry used."""
    n = params.n_spins
    if n > oracle_limit:
        raise ResourceLimitError(
            f"full Hamiltonian needs dimension 2^{n + 1}; oracle limit is N <= {oracle_limit}"
        )
    n_qubits = n + 1
    dim = 2**n_qubits
    states = np.arange(dim)
    # qubit 0 (central) is the most significant bit; bit 0 means spin up
    bits = (states[:, None] >> (n_qubits - 1 - np.arange(n_qubits))[None, :]) & 1
    sz = 1 - 2 * bits
    diagonal = params.omega0 / 2 * sz[:, 0] + params.omega / 2 * sz[:, 1:].sum(axis=1)
    h = np.diag(diagonal.astype(float))
    central_mask = 1 << n
    for i in range(1, n_qubits):
        flipped = states ^ (central_mask | (1 << (n_qubits - 1 - i)))
        h[flipped, states] += params.g
    return h


def build_single_mode_hamiltonian(params: ModelParams, cutoff: int = DEFAULT_FOCK_CUTOFF) -> np.ndarray:
    """Spin coupled to one bosonic mode, g sqrt(N) sx (b + b^dag).

    Basis index is ``mu * cutoff + n`` with Fock occupation n < cutoff.
    """
    if int(cutoff) != cutoff or cutoff < 2:
        raise InvalidParameterError(f"Fock cutoff must be an integer >= 2, got {cutoff!r}")
    cutoff = int(cutoff)
    number = np.arange(cutoff, dtype=float)
    b_dag = np.diag(np.sqrt(number[1:]), k=-1)
    coupling = params.g * np.sqrt(params.n_spins)
    h = (
        np.kron(np.eye(2), params.omega * np.diag(number))
        + np.kron(np.diag([params.omega0 / 2, -params.omega0 / 2]), np.eye(cutoff))
        + coupling * np.kron(SIGMA_X, b_dag + b_dag.T)
    )
    return (h + h.T) / 2


def single_mode_top_population(params: ModelParams, cutoff: int) -> float:
    """Ground-state weight on the two highest Fock levels (truncation check)."""
    _, vecs = np.linalg.eigh(build_single_mode_hamiltonian(params, cutoff))
    ground = vecs[:, 0].reshape(2, cutoff)
    return float(np.sum(np.abs(ground[:, -2:]) ** 2))


def converged_fock_cutoff(
    params: ModelParams, cutoff: int = DEFAULT_FOCK_CUTOFF, tol: float = 1e-8, max_cutoff: int = 2000
) -> int:
    """Smallest cutoff >= ``cutoff`` (growing by half) passing the truncation check."""
    while single_mode_top_population(params, cutoff) >= tol:
        if cutoff >= max_cutoff:
            raise ResourceLimitError(f"Fock basis not converged at cutoff {cutoff}")
        cutoff = min(max_cutoff, cutoff + max(cutoff // 2, 1))
    return cutoff


def parity_diagonal(label, n_spins: int) -> np.ndarray:
    """Diagonal of exp(i pi [Jz + sz/2 + (1 + (-1)^N)/4]) in the block basis."""
    label = check_sector(n_spins, label)
    two_m = np.arange(label.bath_dim) * 2 - label.two_j
    two_const = 1 if n_spins % 2 == 0 else 0
    signs = []
    for two_sz in (1, -1):
        exponent = (two_m + two_sz + two_const) // 2  # always an integer
        signs.append(np.where(exponent % 2 == 0, 1.0, -1.0))
    return np.concatenate(signs)
