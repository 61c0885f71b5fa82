"""Scalar diagnostics of the central spin and of system-bath correlations.

Entropies are in bits.  ``L(t) = C(t) / C(0)`` is kept complex; callers
pick the real part or the modulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._numerics import entropy_from_spectrum
from .errors import InvalidInputError, InvalidStateError, InvalidWindowError, UndefinedRatioError
from .evolution import TrajectoryResult
from .grid import TimeGrid
from .model import CentralState
from .symmetry import INFINITE

KINDS = ("probability", "coherence", "coherence_ratio", "mutual_entropy", "sigma_x", "sigma_y", "sigma_z")


@dataclass(frozen=True, eq=False)
class ObservableSeries:
    grid: TimeGrid
    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown series kind {self.kind!r}")
        values = np.asarray(self.values)
        if values.shape != (self.grid.n_steps,):
            raise InvalidInputError(
                f"series has {values.shape} values for a grid of {self.grid.n_steps} points"
            )
        object.__setattr__(self, "values", values)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times


def _rho(state) -> np.ndarray:
    return state.rho if isinstance(state, CentralState) else np.asarray(state)


def probability_up(rho_s) -> float:
    return float(_rho(rho_s)[0, 0].real)


def coherence(rho_s) -> complex:
    """<down| rho_S |up>."""
    return complex(_rho(rho_s)[1, 0])


def bloch_vector(rho_s) -> tuple[float, float, float]:
    rho = _rho(rho_s)
    off = rho[0, 1]
    return (2 * off.real, -2 * off.imag, float((rho[0, 0] - rho[1, 1]).real))


def probability_series(traj: TrajectoryResult) -> ObservableSeries:
    return ObservableSeries(traj.grid, traj.probability, "probability")


def coherence_series(traj: TrajectoryResult) -> ObservableSeries:
    return ObservableSeries(traj.grid, traj.coherence, "coherence")


def bloch_series(traj: TrajectoryResult) -> tuple[ObservableSeries, ObservableSeries, ObservableSeries]:
    off = traj.rho_central[:, 0, 1]
    z = (traj.rho_central[:, 0, 0] - traj.rho_central[:, 1, 1]).real
    return (
        ObservableSeries(traj.grid, 2 * off.real, "sigma_x"),
        ObservableSeries(traj.grid, -2 * off.imag, "sigma_y"),
        ObservableSeries(traj.grid, z, "sigma_z"),
    )


def coherence_ratio(series: ObservableSeries) -> ObservableSeries:
    if series.kind != "coherence":
        raise InvalidInputError(f"expected a coherence series, got {series.kind!r}")
    c0 = series.values[0]
    if c0 == 0:
        raise UndefinedRatioError("initial coherence is zero; L(t) = C(t)/C(0) is undefined")
    ratio = np.asarray(series.values, dtype=complex) / c0
    ratio[0] = 1.0
    return ObservableSeries(series.grid, ratio, "coherence_ratio")


def fluctuation(series: ObservableSeries, t_min: float = 50.0) -> float:
    """Time variance of P(t) over the window t > t_min."""
    window = series.values[series.times > t_min].real
    if window.size == 0:
        raise InvalidWindowError(f"no grid points after t_min={t_min} (t_max={series.grid.t_max})")
    return float(np.mean((window - window.mean()) ** 2))


def window_mean(series: ObservableSeries, t_lo: float, t_hi: float) -> float:
    times = series.times
    window = series.values[(times >= t_lo) & (times <= t_hi)]
    if window.size == 0:
        raise InvalidWindowError(f"no grid points in [{t_lo}, {t_hi}]")
    return float(np.mean(window.real))


def von_neumann_entropy(rho, tol: float = 1e-10) -> float:
    """-Tr rho log2 rho for a density matrix of any dimension."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > tol:
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise InvalidStateError(f"trace is {np.trace(rho).real!r}, expected 1")
    lam = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if lam[0] < -tol or lam[-1] > 1 + tol:
        raise InvalidStateError("density matrix is not positive semidefinite")
    return max(0.0, float(entropy_from_spectrum(lam)))


def mutual_entropy_series(traj: TrajectoryResult) -> ObservableSeries:
    """I(t) = S(rho_S) + S(rho_B) - S(rho_SB) in bits."""
    if not traj.has_entropies:
        raise InvalidInputError("trajectory was run without entropies")
    values = traj.entropy_central + traj.entropy_bath - traj.entropy_joint
    return ObservableSeries(traj.grid, values, "mutual_entropy")


def thermal_reference(beta, omega0: float) -> tuple[CentralState, float]:
    """Gibbs state of the bare central spin and its up-population."""
    if beta is INFINITE:
        return CentralState.down(), 0.0
    x = beta * omega0 / 2
    p_up = 0.5 - math.tanh(x) / 2
    return CentralState(np.diag([p_up, 1 - p_up])), p_up
