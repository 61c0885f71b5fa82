"""Discrete Fourier spectra of observable series and peak extraction.

Angular frequencies throughout.  Amplitudes are one-sided magnitudes
scaled by 2/n on interior bins and 1/n on the DC and Nyquist bins, so a
unit-amplitude cosine on a bin reports 1.  A rectangular window is used.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidGridError, InvalidInputError
from .observables import ObservableSeries

NORMALIZATION = "one-sided |FFT|, 2/n interior bins, 1/n DC and Nyquist; rectangular window"
MIN_SAMPLES = 16


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    angular_frequencies: np.ndarray
    amplitudes: np.ndarray
    n_samples: int
    dt: float
    detrended: bool
    normalization: str = NORMALIZATION

    @property
    def bin_width(self) -> float:
        return 2 * np.pi / (self.n_samples * self.dt)

    def parseval_weights(self) -> np.ndarray:
        """Weights c_k with sum c_k A_k^2 equal to the mean square of the signal."""
        weights = np.full(len(self.amplitudes), 0.5)
        weights[0] = 1.0
        if self.n_samples % 2 == 0:
            weights[-1] = 1.0
        return weights

    def mean_square(self) -> float:
        return float(np.sum(self.parseval_weights() * self.amplitudes**2))


class Peak(NamedTuple):
    omega: float
    amplitude: float


def _samples(series) -> tuple[np.ndarray, float]:
    if isinstance(series, ObservableSeries):
        return np.asarray(series.values), series.grid.dt
    times, values = series
    times = np.asarray(times, dtype=float)
    steps = np.diff(times)
    if len(steps) == 0 or np.any(steps <= 0) or np.ptp(steps) > 1e-9 * abs(steps[0]):
        raise InvalidGridError("spectrum needs a strictly uniform time grid")
    return np.asarray(values), float(steps[0])


def fourier_coefficients(series, detrend: bool = True) -> tuple[np.ndarray, np.ndarray, float]:
    """Complex one-sided coefficients (normalized like the amplitudes) and frequencies.

    ``series`` is an ObservableSeries or a ``(times, values)`` pair.
    """
    values, dt = _samples(series)
    n = len(values)
    if n < MIN_SAMPLES:
        raise InvalidInputError(f"need at least {MIN_SAMPLES} samples, got {n}")
    if np.iscomplexobj(values):
        if np.any(values.imag):
            raise InvalidInputError("one-sided spectra need a real-valued series")
        values = values.real
    if detrend:
        values = values - values.mean()
    coeffs = np.fft.rfft(values)
    scale = np.full(len(coeffs), 2.0 / n)
    scale[0] = 1.0 / n
    if n % 2 == 0:
        scale[-1] = 1.0 / n
    omegas = 2 * np.pi * np.arange(len(coeffs)) / (n * dt)
    return coeffs * scale, omegas, dt


def power_spectrum(series, detrend: bool = True) -> SpectrumResult:
    coeffs, omegas, dt = fourier_coefficients(series, detrend)
    n = len(series.values) if isinstance(series, ObservableSeries) else len(series[1])
    return SpectrumResult(omegas, np.abs(coeffs), n, dt, detrend)


def find_peaks(spec: SpectrumResult, rel_threshold: float = 0.1) -> list[Peak]:
    """Interior local maxima at or above ``rel_threshold`` times the largest amplitude.

    Positions are refined by a parabola through the three bins around each
    maximum; results are sorted by amplitude, largest first.
    """
    amps = np.asarray(spec.amplitudes, dtype=float)
    if amps.size == 0:
        raise InvalidInputError("empty spectrum")
    if not 0 < rel_threshold <= 1:
        raise InvalidInputError(f"rel_threshold must lie in (0, 1], got {rel_threshold}")
    top = amps.max()
    if amps.size < 3 or top <= 0:
        return []
    left, mid, right = amps[:-2], amps[1:-1], amps[2:]
    candidates = np.flatnonzero((mid > left) & (mid >= right) & (mid >= rel_threshold * top)) + 1
    width = spec.bin_width
    peaks = []
    for k in candidates:
        a, b, c = amps[k - 1], amps[k], amps[k + 1]
        curvature = a - 2 * b + c
        offset = 0.5 * (a - c) / curvature if curvature != 0 else 0.0
        peaks.append(Peak(float((k + offset) * width), float(b)))
    peaks.sort(key=lambda p: -p.amplitude)
    return peaks
