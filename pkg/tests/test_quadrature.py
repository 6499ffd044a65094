import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gspm import builtin_kernel, gauss_legendre, integrate_1d, integrate_2d
from gspm.errors import NumericError


def test_nodes_inside_unit_interval(rule):
    assert rule.nodes.shape == (64,)
    assert np.all(rule.nodes > 0.0)
    assert np.all(rule.nodes < 1.0)
    assert np.all(np.diff(rule.nodes) > 0.0)


def test_weights_positive_and_sum_to_one(rule):
    assert np.all(rule.weights > 0.0)
    assert abs(rule.weights.sum() - 1.0) < 1e-14


def test_rule_is_cached():
    assert gauss_legendre() is gauss_legendre()
    assert gauss_legendre(32) is not gauss_legendre(64)


def test_rule_arrays_are_immutable(rule):
    with pytest.raises(ValueError):
        rule.nodes[0] = 0.5


@pytest.mark.parametrize("k", range(0, 21))
def test_monomial_exactness(rule, k):
    val = integrate_1d(lambda x: x**k, rule)
    assert abs(val - 1.0 / (k + 1)) < 1e-12


def test_high_degree_monomials_still_exact(rule):
    # a 64-node rule integrates polynomials up to degree 127
    for k in (50, 100, 127):
        assert abs(integrate_1d(lambda x: x**k, rule) - 1.0 / (k + 1)) < 1e-12


@given(st.integers(min_value=0, max_value=8), st.integers(min_value=0, max_value=8))
def test_separable_products(i, j):
    rule = gauss_legendre()
    val = integrate_2d(lambda x, y: x**i * y**j, rule)
    assert abs(val - 1.0 / ((i + 1) * (j + 1))) < 1e-12


def test_integrate_2d_constant(rule):
    assert abs(integrate_2d(lambda x, y: np.ones_like(x * y), rule) - 1.0) < 1e-14


def test_integrate_2d_xy(rule):
    assert abs(integrate_2d(lambda x, y: x * y, rule) - 0.25) < 1e-14


def test_w2_bernoulli_variance_integral(rule):
    # closed form 1/5 - (1/25 + 1/81 + 1/900) = 1187/8100
    w2 = builtin_kernel("W2")
    val = integrate_2d(lambda x, y: w2.evaluate(x, y) * (1.0 - w2.evaluate(x, y)), rule)
    assert abs(val - 1187.0 / 8100.0) < 1e-12


@pytest.mark.filterwarnings("ignore:divide by zero")
def test_non_finite_integrand_raises(rule):
    with pytest.raises(NumericError):
        integrate_1d(lambda x: 1.0 / (x - x), rule)


def test_scalar_only_integrand_falls_back(rule):
    def f(x):
        if hasattr(x, "__len__"):
            raise TypeError("scalar only")
        return x * x

    assert abs(integrate_1d(f, rule) - 1.0 / 3.0) < 1e-12
