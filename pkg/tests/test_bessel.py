import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import jv

from hsk.bessel import (
    bessel_row,
    bessel_series_oracle,
    bessel_tail_bound,
    bessel_weighted_tail_bound,
    recurrence_residual,
)

THETAS = [0.25, 1.0, 4.0]


def test_known_value():
    # J_0(2) from tables
    assert bessel_row(1.0, 10).values[0] == pytest.approx(0.22389077914123565, abs=2e-16)


@pytest.mark.parametrize("theta", THETAS)
def test_matches_scipy(theta):
    t = bessel_row(theta, 60)
    ref = jv(np.arange(61), 2 * math.sqrt(theta))
    assert np.max(np.abs(t.values - ref)) <= 1e-14


@pytest.mark.parametrize("theta", THETAS)
def test_series_oracle_vs_scipy(theta):
    z = math.sqrt(theta)
    for n in range(41):
        assert abs(bessel_series_oracle(n, z) - jv(n, 2 * z)) <= 1e-14


@settings(max_examples=40, deadline=None)
@given(theta=st.floats(0.01, 16.0), n_max=st.integers(2, 80))
def test_parseval_and_recurrence(theta, n_max):
    t = bessel_row(theta, n_max)
    # a short table misses 2 * (tail) of the Parseval sum
    assert t.parseval_residual() <= 1e-12 + 2 * t.tail_bound()
    if t.tail_bound() <= 1e-14:
        assert t.parseval_residual() <= 1e-12
    for n in range(n_max - 1):
        assert abs(recurrence_residual(t, n)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(theta=st.floats(0.01, 16.0), n_max=st.integers(2, 60))
def test_doubling_start_index(theta, n_max):
    a = bessel_row(theta, n_max)
    n_start = n_max + max(30, math.ceil(4 * math.sqrt(theta)) + 20)
    b = bessel_row(theta, n_max, n_start=2 * n_start)
    assert np.max(np.abs(a.values - b.values)) <= 1e-13


@pytest.mark.parametrize("theta", [0.1, 0.25, 1.0, 2.0, 4.0])
def test_sign_pattern_beyond_last_zero(theta):
    t = bessel_row(theta, 50)
    start = math.ceil(2 * math.sqrt(theta) + 2)
    assert np.all(t.values[start:] > 0)


@pytest.mark.parametrize("theta", THETAS)
@pytest.mark.parametrize("extra", [0, 5, 20])
def test_tail_bounds_dominate_true_tails(theta, extra):
    z = math.sqrt(theta)
    n = math.ceil(2 * z) + extra
    ks = np.arange(n + 1, n + 200)
    vals = jv(ks, 2 * z)
    true = float(np.sum(vals ** 2))
    wtrue = float(np.sum((ks + 1) * vals ** 2))
    assert true <= bessel_tail_bound(theta, n)
    assert wtrue <= bessel_weighted_tail_bound(theta, n)
    # not wildly loose either
    assert bessel_tail_bound(theta, n) <= 100 * true


@pytest.mark.parametrize("theta", THETAS)
def test_tail_small_past_last_zero(theta):
    n_max = math.ceil(2 * math.sqrt(theta) + 40)
    assert bessel_row(theta, n_max).tail_bound() <= 1e-20


def test_table_is_read_only():
    t = bessel_row(1.0, 5)
    with pytest.raises(ValueError):
        t.values[0] = 0.0


@pytest.mark.parametrize("theta,n", [(0.0, 5), (-1.0, 5), (1.0, 0)])
def test_invalid_input(theta, n):
    with pytest.raises(ValueError):
        bessel_row(theta, n)


def test_oracle_limits():
    with pytest.raises(ValueError):
        bessel_series_oracle(0, 25.0)
    with pytest.raises(ValueError):
        bessel_series_oracle(-1, 1.0)
    with pytest.raises(IndexError):
        recurrence_residual(bessel_row(1.0, 5), 4)
