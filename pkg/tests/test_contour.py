import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holocurve.contour import (
    ContourSpec,
    circle_integral,
    circle_nodes,
    kth_differential,
    mean_value_check,
)
from holocurve.errors import EvaluationError, ParameterError
from holocurve.randpoly import random_polymap


def test_spec_validation():
    with pytest.raises(ParameterError):
        ContourSpec(4, 0.5)
    with pytest.raises(ParameterError):
        ContourSpec(32, 0.0)
    assert ContourSpec(32, 0.5).with_radius(0.1) == ContourSpec(32, 0.1)


def test_nodes_exact_quarter_points():
    w = circle_nodes(32)
    assert (w[0], w[8], w[16], w[24]) == (1, 1j, -1, -1j)


def test_circle_integral_examples():
    spec = ContourSpec(32, 1.0)
    c = np.array([2, 0])
    got = circle_integral(lambda z: c[None, :] / z[:, None], spec)
    np.testing.assert_allclose(got, [2, 0], atol=1e-15)
    np.testing.assert_allclose(circle_integral(lambda z: np.ones((z.size, 2)), spec), 0, atol=1e-15)
    for k in range(-4, 5):
        if k != -1:
            assert abs(circle_integral(lambda z: z**k, spec)) < 1e-14


def test_circle_integral_pointwise_matches_batched():
    spec = ContourSpec(16, 0.7)
    g = lambda z: np.array([np.exp(z), z**-1])  # noqa: E731
    batched = circle_integral(lambda z: np.stack([np.exp(z), 1 / z], axis=-1), spec)
    np.testing.assert_allclose(circle_integral(g, spec, vectorized=False), batched, atol=1e-15)


def test_kth_differential_examples():
    spec = ContourSpec(32, 0.5)
    sq = lambda z: z**2  # noqa: E731
    cube = lambda z: z**3  # noqa: E731
    assert kth_differential(sq, [1.0], [[1.0]], spec)[0] == pytest.approx(2, abs=1e-14)
    assert abs(kth_differential(cube, [0.0], [[1.0], [1.0]], spec)[0]) < 1e-14
    assert kth_differential(cube, [1.0], [[1.0], [1.0]], spec)[0] == pytest.approx(6, abs=1e-13)


def test_kth_zero_order_is_value():
    f = lambda z: np.exp(z)  # noqa: E731
    assert kth_differential(f, [0.3], [], ContourSpec())[0] == pytest.approx(np.exp(0.3))


def test_third_order_and_cap():
    spec = ContourSpec(16, 0.5)
    got = kth_differential(lambda z: z**4, [2.0], [[1.0]] * 3, spec)[0]
    assert got == pytest.approx(48, rel=1e-13)
    with pytest.raises(ParameterError):
        kth_differential(lambda z: z, [0.0], [[1.0]] * 4, spec)


def test_batched_x():
    x = np.array([[0.0], [1.0], [2.0]])
    got = kth_differential(lambda z: z**2, x, [np.ones_like(x)], ContourSpec(16, 0.5))
    np.testing.assert_allclose(got[:, 0], 2 * x[:, 0], atol=1e-13)


def test_pointwise_mode():
    f = lambda z: np.array([z[0] * z[1], z[1] ** 2])  # noqa: E731
    got = kth_differential(f, [1.0, 2.0], [[1.0, 0.0]], ContourSpec(16, 0.5), vectorized=False)
    np.testing.assert_allclose(got, [2, 0], atol=1e-14)


def test_non_finite_reported():
    with np.errstate(all="ignore"), pytest.raises(EvaluationError):
        kth_differential(lambda z: 1 / z, [0.0 + 0.5j], [[1.0]], ContourSpec(16, 0.5))


def test_polynomial_oracle():
    rng = np.random.default_rng(11)
    spec = ContourSpec(64, 0.5)
    for _ in range(30):
        n, k = int(rng.integers(1, 4)), int(rng.integers(0, 4))
        P = random_polymap(rng, n, 5, n_terms=5)
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        dirs = [rng.normal(size=n) + 1j * rng.normal(size=n) for _ in range(k)]
        exact = P.differential(0.0, x, dirs)
        got = kth_differential(lambda z: P(0.0, z), x, dirs, spec)
        assert np.linalg.norm(got - exact) <= 1e-10 * max(1.0, np.linalg.norm(exact))


@settings(max_examples=40, deadline=None)
@given(
    st.complex_numbers(max_magnitude=2, allow_nan=False),
    st.complex_numbers(max_magnitude=2, allow_nan=False),
    st.complex_numbers(max_magnitude=2, allow_nan=False),
)
def test_cauchy_riemann_and_linearity(x, u, alpha):
    spec = ContourSpec(32, 0.5)
    f = lambda z: np.exp(z) + z**3  # noqa: E731
    base = kth_differential(f, [x], [[u]], spec)[0]
    scaled = kth_differential(f, [x], [[alpha * u]], spec)[0]
    assert abs(scaled - alpha * base) <= 1e-11 * max(1.0, abs(alpha * base))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_radius_independence(r1, r2):
    f = lambda z: np.sin(z[..., :1]) * z[..., 1:]  # noqa: E731
    x, u = np.array([0.2, 1j]), np.array([1.0, -0.5])
    a = kth_differential(f, x, [u], ContourSpec(48, r1))
    b = kth_differential(f, x, [u], ContourSpec(48, r2))
    assert np.max(np.abs(a - b)) < 1e-11


def test_symmetry_second_order():
    f = lambda z: np.stack([z[..., 0] ** 2 * z[..., 1], np.exp(z[..., 0] * z[..., 1])], axis=-1)  # noqa: E731
    x, u, w = np.array([0.3, -0.2j]), np.array([1.0, 2.0j]), np.array([-1j, 0.5])
    spec = ContourSpec(32, 0.5)
    np.testing.assert_allclose(
        kth_differential(f, x, [u, w], spec), kth_differential(f, x, [w, u], spec), atol=1e-12
    )


def test_mean_value_examples():
    spec = ContourSpec(32, 0.5)
    lin = lambda z: 3 * z + 1j  # noqa: E731
    assert mean_value_check(lin, [0.4], [1 + 1j], spec) < 1e-14
    coeffs = [1 / math.factorial(j) for j in range(11)]
    exp_like = lambda z: np.polynomial.polynomial.polyval(z, coeffs)  # noqa: E731
    assert mean_value_check(exp_like, [0.3], [1.0], spec) < 1e-13
    # conj is harmonic but not holomorphic; oracle: (1/m) sum conj(r w) w = r
    got = mean_value_check(np.conj, [0.0], [1.0], spec)
    assert got == pytest.approx(spec.radius, rel=1e-12)
    assert mean_value_check(np.conj, [0.0], [1.0], spec.with_radius(0.1)) == pytest.approx(0.1, rel=1e-12)


def test_mean_value_abs_detected():
    assert mean_value_check(lambda z: np.abs(z) ** 2, [0.0], [1.0], ContourSpec(32, 0.5)) > 0.01
