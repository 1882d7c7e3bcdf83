"""Bessel functions against an independent arbitrary-precision oracle (mpmath)."""
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbattery.bessel import (MAX_ARG, MAX_ORDER, bessel_j, bessel_j0_zero, bessel_j_orders,
                             jacobi_anger_sum, sideband_cutoff)

mpmath.mp.dps = 40


def oracle(n, x):
    return float(mpmath.besselj(n, x))


@pytest.mark.parametrize("n,x", [
    (0, 0.0), (0, 1e-8), (1, 0.5), (0, 2.404825557695773), (3, 1.0), (5, 7.3), (0, 30.0),
    (10, 10.0), (40, 12.0), (100, 99.9), (200, 100.0), (200, 3.0), (1, 100.0), (0, 100.0),
])
def test_against_oracle(n, x):
    assert abs(bessel_j(n, x) - oracle(n, x)) < 1e-12


@given(st.integers(-MAX_ORDER, MAX_ORDER), st.floats(-MAX_ARG, MAX_ARG))
@settings(max_examples=300, deadline=None)
def test_random_against_oracle(n, x):
    assert abs(bessel_j(n, x) - oracle(n, x)) < 1e-12


def test_orders_sweep_matches_pointwise():
    x = 4.7
    table = bessel_j_orders(30, x)
    np.testing.assert_allclose(table, [oracle(n, x) for n in range(31)], atol=1e-14)


def test_values():
    assert bessel_j(0, 0.0) == 1.0
    assert abs(bessel_j(0, 2.40483)) < 1e-5
    # CR prefactor at xi = 0.8
    assert abs(bessel_j(0, 1.6) - 0.4554) < 1e-4


@pytest.mark.parametrize("n", [1, 2, 7, 30])
@pytest.mark.parametrize("x", [0.3, 2.0, -5.5])
def test_reflection(n, x):
    assert bessel_j(-n, x) == pytest.approx((-1) ** n * bessel_j(n, x), abs=1e-15)


@pytest.mark.parametrize("x", [0.0, 1.5, 9.0, 50.0])
def test_sum_rule(x):
    total = bessel_j(0, x) ** 2 + 2 * sum(bessel_j(n, x) ** 2 for n in range(1, 80))
    assert abs(total - 1) < 1e-12


def test_sum_rule_symmetric_range():
    assert abs(sum(bessel_j(n, 1.5) ** 2 for n in range(-50, 51)) - 1) < 1e-12


@pytest.mark.parametrize("order,x", [(201, 1.0), (0, 100.5), (0, math.nan), (-201, 1.0)])
def test_range_checked(order, x):
    with pytest.raises(ValueError):
        bessel_j(order, x)


def test_order_must_be_integer():
    with pytest.raises(TypeError):
        bessel_j(1.5, 1.0)


@pytest.mark.parametrize("k", range(1, 21))
def test_zeros(k):
    ref = float(mpmath.besseljzero(0, k))
    assert abs(bessel_j0_zero(k) - ref) < 1e-10


def test_first_zeros():
    assert abs(bessel_j0_zero(1) - 2.40483) < 1e-5
    assert abs(bessel_j0_zero(2) - 5.52008) < 1e-5
    # half the first zero is the modulation amplitude that cancels J0(2 xi)
    assert abs(bessel_j0_zero(1) / 2 - 1.202) < 1e-3


@pytest.mark.parametrize("k", [0, 21, 1.0])
def test_zero_index_range(k):
    with pytest.raises(ValueError):
        bessel_j0_zero(k)


@given(st.floats(0.0, 10.0), st.floats(-20.0, 20.0))
@settings(max_examples=100, deadline=None)
def test_jacobi_anger(xi, phase):
    exact = np.exp(1j * xi * math.sin(phase))
    assert abs(jacobi_anger_sum(xi, phase) - exact) < 1e-10


def test_cutoff():
    assert sideband_cutoff(1.2) == 22
    assert sideband_cutoff(-3.0) == 23
