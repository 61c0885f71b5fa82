import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinstar.errors import InvalidGridError, InvalidInputError
from spinstar.spectral import find_peaks, power_spectrum


def test_unit_cosine_on_bin():
    n, dt = 1024, 0.1
    t = dt * np.arange(n)
    omega = 2 * np.pi * 37 / (n * dt)
    spec = power_spectrum((t, np.cos(omega * t) + 3.0))
    k = spec.amplitudes.argmax()
    assert math.isclose(spec.angular_frequencies[k], omega)
    assert math.isclose(spec.amplitudes[k], 1.0, rel_tol=1e-12)
    assert spec.amplitudes[0] < 1e-12  # detrended


@given(st.lists(st.floats(-1, 1), min_size=16, max_size=80))
@settings(max_examples=50, deadline=None)
def test_parseval(values):
    values = np.array(values)
    t = 0.5 * np.arange(len(values))
    spec = power_spectrum((t, values), detrend=False)
    assert math.isclose(spec.mean_square(), np.mean(values**2), rel_tol=1e-9, abs_tol=1e-12)


def test_peaks_between_bins():
    n, dt = 4000, 0.05
    t = dt * np.arange(n)
    signal = np.cos(1.03 * t) + 0.5 * np.cos(2.5 * t)
    peaks = find_peaks(power_spectrum((t, signal)), rel_threshold=0.2)
    assert len(peaks) == 2
    width = 2 * np.pi / (n * dt)
    assert abs(peaks[0].omega - 1.03) < 0.5 * width
    assert abs(peaks[1].omega - 2.5) < 0.5 * width


def test_input_checks():
    t = np.array([0, 1, 2, 4] + list(range(5, 20)), dtype=float)
    with pytest.raises(InvalidGridError):
        power_spectrum((t, np.zeros_like(t)))
    with pytest.raises(InvalidInputError):
        power_spectrum((np.arange(8.0), np.zeros(8)))
    t = np.arange(32.0)
    with pytest.raises(InvalidInputError):
        power_spectrum((t, np.exp(1j * t)))
    with pytest.raises(InvalidInputError):
        find_peaks(power_spectrum((t, np.cos(t))), rel_threshold=0)


@pytest.mark.parametrize("level", [0.0, 1 / 3, 123.456])
def test_flat_series_has_no_peaks(level):
    t = 0.1 * np.arange(100)
    assert find_peaks(power_spectrum((t, np.full(100, level)))) == []


def test_linearity_of_coefficients():
    from spinstar.spectral import fourier_coefficients

    rng = np.random.default_rng(3)
    t = 0.2 * np.arange(64)
    a, b = rng.normal(size=64), rng.normal(size=64)
    ca, cb, cab = (fourier_coefficients((t, x))[0] for x in (a, b, a + b))
    assert np.allclose(ca + cb, cab, atol=1e-14)
