import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holocurve import chifun
from holocurve.chifun import (
    chi,
    chi_map,
    continuity_bound_check,
    dchi,
    remainder_bound_check,
    remainder_delta,
    tail_index,
    unboundedness_witness,
)
from holocurve.contour import ContourSpec, kth_differential
from holocurve.errors import ParameterError
from holocurve.lincomplex import norm


def e(i, n=8, s=1.0):
    x = np.zeros(n, dtype=complex)
    x[i] = s
    return x


def test_chi_examples():
    assert chi(np.zeros(8)) == 0
    assert chi(e(1, s=0.5)) == pytest.approx(0.5)
    assert chi(e(2, s=0.5)) == pytest.approx(0.5)


def test_chi_map_batched():
    pts = np.array([[[0, 0.5, 0, 0], [0, 0, 0.5, 1]]], dtype=complex)
    np.testing.assert_allclose(chi_map(pts)[..., 0], [[0.5, 3.5]])


def test_dchi_examples():
    u = np.arange(8) + 1j
    assert dchi(np.zeros(8), u) == u[1]
    assert dchi(e(3, s=0.2), np.zeros(8)) == 0
    assert dchi(e(2, s=0.5), e(2)) == pytest.approx(2)
    with pytest.raises(ParameterError):
        dchi(np.zeros(3), np.zeros(4))


def test_dchi_matches_contour():
    rng = np.random.default_rng(5)
    for _ in range(20):
        x = 0.3 * (rng.normal(size=16) + 1j * rng.normal(size=16))
        u = rng.normal(size=16) + 1j * rng.normal(size=16)
        got = kth_differential(chi_map, x, [u], ContourSpec(64, 0.5))[0]
        assert abs(got - dchi(x, u)) <= 1e-10 * abs(dchi(x, u))


def test_witness_examples():
    x, value = unboundedness_witness(30, 100)
    assert value.real == pytest.approx(99 * (98 / 99) ** 99, rel=1e-14)
    assert value.real > 30 and norm(x, 1) < 1 and norm(x, 2) < 1
    x, value = unboundedness_witness(1, 8)
    assert np.flatnonzero(x)[0] <= 7 and abs(value) > 1
    with pytest.raises(ParameterError, match="2718283"):
        unboundedness_witness(1e6, 100)


def test_tail_index():
    assert tail_index(np.zeros(5)) == 0
    assert tail_index(np.array([0, 0.2, 0.1, 0.125, 0.01])) == 4
    assert tail_index(np.array([0.5, 0, 0]), np.array([0, 0, 0.9])) == 3


def _direct_delta(x, u, t):
    i = np.arange(x.size)
    return float(np.sum(i * np.abs(((x + t * u) ** i - x**i) / t - i * x ** np.maximum(i - 1, 0) * u)))


def test_remainder_delta_matches_direct_formula():
    rng = np.random.default_rng(1)
    x = 0.4 * (rng.normal(size=10) + 1j * rng.normal(size=10))
    u = rng.normal(size=10) + 1j * rng.normal(size=10)
    for t in (0.3, 0.1j, -0.05 + 0.05j):
        assert remainder_delta(x, u, t) == pytest.approx(_direct_delta(x, u, t), rel=1e-9)


def test_difference_matches_direct():
    rng = np.random.default_rng(2)
    x = 0.5 * (rng.normal(size=12) + 1j * rng.normal(size=12))
    u = 0.01 * (rng.normal(size=12) + 1j * rng.normal(size=12))
    assert chifun._difference(x, u) == pytest.approx(chi(x + u) - chi(x), rel=1e-10)


def test_continuity_examples():
    u = e(3, s=0.1)
    lhs, rhs, ok = continuity_bound_check(np.zeros(8), u)
    assert lhs == pytest.approx(abs(chi(u))) and ok and lhs <= rhs
    lhs, rhs, ok = continuity_bound_check(e(2, s=0.9), np.zeros(8))
    assert lhs == 0 and ok
    with pytest.raises(ParameterError):
        continuity_bound_check(np.zeros(8), e(1, s=0.2))


def test_continuity_n0_rhs():
    chk = continuity_bound_check(np.zeros(8), e(1, s=0.1))
    assert chk.N == 0
    assert chk.rhs == pytest.approx(0.1 * 2**3)


def test_remainder_examples():
    delta, ratio, ok = remainder_bound_check(e(4, s=0.7), np.zeros(8), 1e-3)
    assert ratio == 0 and ok
    delta, ratio, ok = remainder_bound_check(np.array([0.3]), np.array([2.0]), 1e-3)
    assert ratio == 0 and ok
    with pytest.raises(ParameterError):
        remainder_bound_check(np.zeros(2), np.zeros(2), 0)


complex_entries = st.complex_numbers(max_magnitude=1.0, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(complex_entries, min_size=2, max_size=24),
    st.floats(0, 0.124),
    st.sampled_from([1.0, 2.0]),
    st.integers(0, 2**32 - 1),
)
def test_continuity_property(xs, unorm, p, seed):
    x = np.array(xs)
    rng = np.random.default_rng(seed)
    u = rng.normal(size=x.size) + 1j * rng.normal(size=x.size)
    u *= unorm / norm(u, p)
    assert continuity_bound_check(x, u, p).ok


@settings(max_examples=40, deadline=None)
@given(
    st.lists(complex_entries, min_size=2, max_size=16),
    st.floats(-6, 0),
    st.sampled_from([1.0, 2.0]),
    st.integers(0, 2**32 - 1),
)
def test_remainder_property(xs, log_eps, p, seed):
    x = np.array(xs)
    rng = np.random.default_rng(seed)
    u = rng.uniform(0, 1.5, x.size) * np.exp(2j * math.pi * rng.uniform(size=x.size))
    assert remainder_bound_check(x, u, 10.0**log_eps, p).ok
