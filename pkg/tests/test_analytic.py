import math

import numpy as np
import pytest

from spinstar.analytic import (
    bath_correlation,
    bath_correlation_numeric,
    correlation_phase_report,
    rabi_frequency,
    single_mode_lines,
)
from spinstar.errors import ResourceLimitError
from spinstar.symmetry import INFINITE, ModelParams


@pytest.mark.parametrize("n", [1, 4, 8])
@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0, 3.0])
def test_modulus_matches_brute_force(n, beta):
    params = ModelParams(n_spins=n, beta=beta, g=0.1)
    for dt in (0.0, 0.7, 5.0):
        assert abs(bath_correlation(params, dt).modulus - abs(bath_correlation_numeric(params, dt, 0.0))) < 1e-12


def test_modulus_constant_and_zero_temperature():
    params = ModelParams(n_spins=201, beta=0.5)
    mods = {bath_correlation(params, dt).modulus for dt in np.linspace(0, 100, 51)}
    assert len(mods) == 1
    assert bath_correlation(ModelParams(beta=INFINITE), 1.0).modulus == 0.0
    assert math.isclose(bath_correlation(ModelParams(n_spins=4, beta=0.0), 0.0).modulus, 0.01 * 4 * 0.5)


def test_phase_report_flags_mismatch():
    report = correlation_phase_report(ModelParams(n_spins=3, beta=0.5), np.linspace(0, 3, 7))
    assert not report.consistent
    assert math.isclose(report.fitted_frequency, 1.0, rel_tol=1e-9)
    assert any("DISAGREES" in line for line in report.lines())


def test_numeric_cap():
    with pytest.raises(ResourceLimitError):
        bath_correlation_numeric(ModelParams(n_spins=13), 0, 0)


def test_rabi_and_single_mode_lines():
    params = ModelParams(n_spins=201, beta=INFINITE)
    assert math.isclose(rabi_frequency(params), 2.835489375751565, rel_tol=1e-12)
    lines = single_mode_lines(params, 60, rel_threshold=0.1)
    assert lines and all(line.omega > 0 for line in lines)
    # total weight of the lines reproduces P(0) - <P> structure: amplitudes are bounded by 1
    assert max(line.amplitude for line in lines) <= 1.0
