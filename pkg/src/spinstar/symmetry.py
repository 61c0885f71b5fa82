"""Collective angular-momentum bookkeeping for a bath of N spin-1/2.

The bath Hilbert space splits into sectors of total angular momentum j,
each of dimension 2j+1 and occurring alpha_j times.  Sectors are labelled
by the integer ``two_j = 2j`` so that half-integer j never needs floats.

Conventions used by every module in the package:

- hbar = k_B = 1.
- Inside a sector the basis is |j, m> with m ascending from -j to j, so
  index ``k = m + j``.
- All degeneracies, partition functions and weights are carried as natural
  logarithms; N = 201 gives binomials around 1e59.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import logsumexp

from .errors import InvalidParameterError, InvalidSectorError


class Temperature(enum.Enum):
    INFINITE = "inf"

    def __repr__(self) -> str:
        return "INFINITE"

    def __str__(self) -> str:
        return "inf"


#: Inverse temperature of the zero-temperature limit (beta -> infinity).
INFINITE = Temperature.INFINITE


def is_infinite(beta) -> bool:
    return beta is INFINITE


def parse_beta(value) -> float | Temperature:
    """Coerce user input (number, ``"inf"``, ``float('inf')``) to a beta value."""
    if value is INFINITE:
        return INFINITE
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "+inf"):
            return INFINITE
        try:
            value = float(text)
        except ValueError:
            raise InvalidParameterError(f"beta: cannot parse {value!r}") from None
    value = float(value)
    if math.isnan(value):
        raise InvalidParameterError("beta: NaN is not a temperature")
    if math.isinf(value) and value > 0:
        return INFINITE
    if value < 0:
        raise InvalidParameterError(f"beta must be >= 0 or inf, got {value}")
    return value


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of one spin-star simulation.

    Energies are in units of ``omega`` by convention (default 1).
    """

    omega0: float = 1.0
    omega: float = 1.0
    g: float = 0.1
    n_spins: int = 201
    beta: float | Temperature = 0.0

    def __post_init__(self):
        if isinstance(self.n_spins, bool) or int(self.n_spins) != self.n_spins:
            raise InvalidParameterError(f"n_spins must be an integer, got {self.n_spins!r}")
        object.__setattr__(self, "n_spins", int(self.n_spins))
        if self.n_spins < 1:
            raise InvalidParameterError(f"n_spins must be >= 1, got {self.n_spins}")
        for name in ("omega0", "omega", "g"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.omega <= 0:
            raise InvalidParameterError(f"omega must be > 0, got {self.omega}")
        object.__setattr__(self, "beta", parse_beta(self.beta))

    @property
    def zero_temperature(self) -> bool:
        return self.beta is INFINITE


@dataclass(frozen=True, order=True)
class BlockLabel:
    """One angular-momentum sector, identified by ``two_j = 2j``."""

    two_j: int

    def __post_init__(self):
        if int(self.two_j) != self.two_j or self.two_j < 0:
            raise InvalidSectorError(f"two_j must be a nonnegative integer, got {self.two_j!r}")
        object.__setattr__(self, "two_j", int(self.two_j))

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def bath_dim(self) -> int:
        return self.two_j + 1

    @property
    def block_dim(self) -> int:
        return 2 * (self.two_j + 1)

    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers, ascending."""
        return (np.arange(self.two_j + 1) * 2 - self.two_j) / 2


def allowed_two_j(n_spins: int) -> list[BlockLabel]:
    """Sectors present in N spin-1/2, ordered by descending j."""
    if isinstance(n_spins, bool) or int(n_spins) != n_spins or n_spins < 1:
        raise InvalidParameterError(f"n_spins must be a positive integer, got {n_spins!r}")
    n_spins = int(n_spins)
    return [BlockLabel(t) for t in range(n_spins, n_spins % 2 - 1, -2)]


def check_sector(n_spins: int, two_j) -> BlockLabel:
    label = two_j if isinstance(two_j, BlockLabel) else BlockLabel(two_j)
    if label.two_j > n_spins or (n_spins - label.two_j) % 2:
        raise InvalidSectorError(
            f"two_j={label.two_j} is not a sector of N={n_spins} spins "
            f"(need two_j <= N with the parity of N)"
        )
    return label


def degeneracy_exact(n_spins: int, two_j) -> int:
    """Multiplicity alpha_j of sector j, as an exact integer."""
    label = check_sector(n_spins, two_j)
    k = (n_spins - label.two_j) // 2
    below = math.comb(n_spins, k - 1) if k >= 1 else 0
    return math.comb(n_spins, k) - below


def degeneracy_log(n_spins: int, two_j) -> float:
    """Natural log of alpha_j via log-gamma.

    Uses alpha_j = C(N, k) (2j+1) / (N-k+1) with k = N/2 - j, which avoids
    the cancellation in the difference of two binomials.
    """
    label = check_sector(n_spins, two_j)
    k = (n_spins - label.two_j) // 2
    if k == 0:
        return 0.0
    log_binom = math.lgamma(n_spins + 1) - math.lgamma(k + 1) - math.lgamma(n_spins - k + 1)
    return log_binom + math.log(label.two_j + 1) - math.log(n_spins - k + 1)


@dataclass(frozen=True)
class SectorWeights:
    """Log-domain thermal bookkeeping of all sectors, descending j.

    ``log_weight[i]`` is ln(alpha_j Z_j / Z), the total probability of
    sector i summed over its degenerate copies.  At zero temperature
    ``log_zj`` and ``log_partition`` are +inf (they diverge) and the weight
    sits entirely on the two_j = N sector.
    """

    labels: tuple[BlockLabel, ...]
    log_alpha: np.ndarray
    log_zj: np.ndarray
    log_weight: np.ndarray
    log_partition: float

    @cached_property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weight)

    def __iter__(self):
        return iter(zip(self.labels, self.log_alpha, self.log_weight))


def log_sector_partition(label: BlockLabel, beta, omega: float) -> float:
    """ln Z_j = ln sum_m exp(-beta omega m)."""
    if beta is INFINITE:
        return math.inf
    return float(logsumexp(-beta * omega * label.m_values()))


def sector_weights(params: ModelParams) -> SectorWeights:
    labels = tuple(allowed_two_j(params.n_spins))
    log_alpha = np.array([degeneracy_log(params.n_spins, lab) for lab in labels])
    if params.beta is INFINITE:
        log_zj = np.full(len(labels), math.inf)
        log_weight = np.full(len(labels), -math.inf)
        log_weight[0] = 0.0  # labels[0] is two_j = N, holding m = -N/2
        return SectorWeights(labels, log_alpha, log_zj, log_weight, math.inf)

    log_zj = np.array([log_sector_partition(lab, params.beta, params.omega) for lab in labels])
    log_partition = float(logsumexp(log_alpha + log_zj))
    log_weight = log_alpha + log_zj - log_partition
    return SectorWeights(labels, log_alpha, log_zj, log_weight, log_partition)


def angular_momentum_matrices(two_j: int):
    """Spin-j matrices ``(Jz, Jx, Jplus, Jminus)`` in the m-ascending basis."""
    label = two_j if isinstance(two_j, BlockLabel) else BlockLabel(two_j)
    j = label.j
    m = label.m_values()
    jz = np.diag(m)
    # <j, m+1| J+ |j, m> sits one row below the diagonal in m-ascending order
    ladder = np.sqrt(np.clip(j * (j + 1) - m[:-1] * (m[:-1] + 1), 0.0, None))
    jplus = np.diag(ladder, k=-1)
    jminus = jplus.T.copy()
    jx = (jplus + jminus) / 2
    return jz, jx, jplus, jminus
