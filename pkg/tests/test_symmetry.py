import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinstar.errors import InvalidParameterError, InvalidSectorError
from spinstar.symmetry import (
    INFINITE,
    BlockLabel,
    ModelParams,
    allowed_two_j,
    angular_momentum_matrices,
    check_sector,
    degeneracy_exact,
    degeneracy_log,
    parse_beta,
    sector_weights,
)


def test_allowed_sectors_descending():
    assert [lab.two_j for lab in allowed_two_j(5)] == [5, 3, 1]
    assert [lab.two_j for lab in allowed_two_j(4)] == [4, 2, 0]


def test_degeneracy_small_cases():
    # four spin-1/2: one quintet, three triplets, two singlets
    assert [degeneracy_exact(4, t) for t in (4, 2, 0)] == [1, 3, 2]
    assert [degeneracy_exact(3, t) for t in (3, 1)] == [1, 2]


@pytest.mark.parametrize("n", range(1, 31))
def test_dimension_identity(n):
    total = sum(degeneracy_exact(n, lab) * lab.bath_dim for lab in allowed_two_j(n))
    assert total == 2**n


@given(st.integers(min_value=1, max_value=400), st.data())
@settings(max_examples=60, deadline=None)
def test_log_degeneracy_matches_exact(n, data):
    lab = data.draw(st.sampled_from(allowed_two_j(n)))
    exact = degeneracy_exact(n, lab)
    assert math.isclose(degeneracy_log(n, lab), math.log(exact), rel_tol=1e-12, abs_tol=1e-12)


def test_invalid_sector():
    with pytest.raises(InvalidSectorError):
        check_sector(4, 3)
    with pytest.raises(InvalidSectorError):
        check_sector(4, 6)
    with pytest.raises(InvalidSectorError):
        BlockLabel(-2)


@pytest.mark.parametrize("beta", [0.0, 0.1, 0.5, 1.0, 3.0])
def test_partition_function_n201(beta):
    w = sector_weights(ModelParams(n_spins=201, beta=beta))
    expected = 201 * math.log(2 * math.cosh(beta / 2))
    assert math.isclose(w.log_partition, expected, rel_tol=1e-10)
    assert math.isclose(w.weights.sum(), 1.0, rel_tol=1e-12)


def test_zero_temperature_weights():
    w = sector_weights(ModelParams(n_spins=7, beta=INFINITE))
    assert w.labels[0].two_j == 7
    assert w.weights[0] == 1.0 and np.all(w.weights[1:] == 0)


@pytest.mark.parametrize("two_j", [0, 1, 2, 5, 10])
def test_angular_momentum_algebra(two_j):
    jz, jx, jp, jm = angular_momentum_matrices(two_j)
    j = two_j / 2
    jy = (jp - jm) / 2j
    assert np.allclose(jx @ jy - jy @ jx, 1j * jz)
    casimir = jx @ jx + jy @ jy + jz @ jz
    assert np.allclose(casimir, j * (j + 1) * np.eye(two_j + 1))


@pytest.mark.parametrize("text,expected", [("inf", INFINITE), ("0.5", 0.5), (math.inf, INFINITE), (0, 0.0)])
def test_parse_beta(text, expected):
    assert parse_beta(text) == expected


@pytest.mark.parametrize("bad", ["-1", -0.1, "nan", "abc"])
def test_parse_beta_rejects(bad):
    with pytest.raises(InvalidParameterError):
        parse_beta(bad)


def test_model_params_validation():
    with pytest.raises(InvalidParameterError):
        ModelParams(n_spins=0)
    with pytest.raises(InvalidParameterError):
        ModelParams(omega=0.0)
    with pytest.raises(InvalidParameterError):
        ModelParams(g=math.nan)


@pytest.mark.parametrize("n", [1, 2, 7, 20, 45, 60])
def test_infinite_temperature_weights_exact(n):
    # at beta = 0 every bath state is equally likely: w_j = alpha_j (2j+1) / 2^N
    from fractions import Fraction

    w = sector_weights(ModelParams(n_spins=n, beta=0.0))
    for lab, weight in zip(w.labels, w.weights):
        exact = Fraction(degeneracy_exact(n, lab) * lab.bath_dim, 2**n)
        assert math.isclose(weight, float(exact), rel_tol=1e-12)
