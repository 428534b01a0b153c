"""Circle quadrature and Cauchy-formula differentials.

The circle integral of ``g`` is ``int_0^1 g(r e^{2 pi i s}) e^{2 pi i s} ds``,
computed with the trapezoid rule on ``m`` equispaced nodes. For integrands
that are analytic in an annulus around the circle this converges
geometrically, and circle harmonics ``zeta^k`` with ``|k| < m/2`` are
integrated exactly up to rounding.

Maps handed to :func:`kth_differential` and :func:`mean_value_check` are
*batched*: they receive an array of points of shape ``(..., n)`` and must
return ``(..., n_out)``. Plain numpy expressions such as
``lambda z: z**2`` satisfy this automatically; wrap anything else with
``vectorized=False``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, ParameterError
from .lincomplex import norm

__all__ = [
    "ContourSpec",
    "circle_nodes",
    "circle_integral",
    "kth_differential",
    "mean_value_check",
    "MAX_ORDER",
]

MAX_ORDER = 3


@dataclass(frozen=True)
class ContourSpec:
    """Node count and radius of a quadrature circle.

    Inside :mod:`holocurve.superpose` and :mod:`holocurve.odesolve` the
    radius is read as a fraction of the certified radius, so it must not
    exceed 1 there.
    """

    m_nodes: int = 64
    radius: float = 0.5

    def __post_init__(self):
        if int(self.m_nodes) != self.m_nodes or self.m_nodes < 8:
            raise ParameterError(f"m_nodes must be an integer >= 8, got {self.m_nodes!r}")
        if not self.radius > 0:
            raise ParameterError(f"radius must be positive, got {self.radius!r}")
        object.__setattr__(self, "m_nodes", int(self.m_nodes))
        object.__setattr__(self, "radius", float(self.radius))

    def with_radius(self, radius: float) -> "ContourSpec":
        return ContourSpec(self.m_nodes, radius)


def circle_nodes(m: int) -> np.ndarray:
    """The ``m``-th roots of unity ``exp(2 pi i j / m)``."""
    j = np.arange(m)
    w = np.exp(2j * np.pi * j / m)
    # exact values at the quarter points keep symmetric cases clean
    if m % 4 == 0:
        q = m // 4
        w[0], w[q], w[2 * q], w[3 * q] = 1, 1j, -1, -1j
    return w


def _pointwise(f):
    def batched(points):
        pts = np.asarray(points)
        flat = pts.reshape(-1, pts.shape[-1])
        out = [np.atleast_1d(np.asarray(f(p), dtype=complex)) for p in flat]
        out = np.stack(out)
        return out.reshape(pts.shape[:-1] + out.shape[-1:])

    return batched


def _check_finite(values, locate):
    bad = ~np.isfinite(values)
    if bad.any():
        idx = np.argwhere(bad)[0]
        node = locate(tuple(idx))
        raise EvaluationError(f"non-finite value at quadrature node {node!r}", node=node)


def circle_integral(g, spec: ContourSpec, vectorized: bool = True) -> np.ndarray:
    """Trapezoid rule for ``int_0^1 g(r e^{2 pi i s}) e^{2 pi i s} ds``.

    ``g`` maps an array of nodes ``zeta_j = r e^{2 pi i j/m}`` to an array
    with the node index on the first axis. Returns
    ``(1/m) sum_j g(zeta_j) zeta_j / r``.
    """
    w = circle_nodes(spec.m_nodes)
    zeta = spec.radius * w
    if vectorized:
        vals = np.asarray(g(zeta), dtype=complex)
    else:
        vals = np.stack([np.asarray(g(z), dtype=complex) for z in zeta])
    if vals.ndim == 0 or vals.shape[0] != spec.m_nodes:
        vals = np.broadcast_to(vals, (spec.m_nodes,) + np.shape(vals))
    _check_finite(vals, lambda idx: complex(zeta[idx[0]]))
    weights = w.reshape((-1,) + (1,) * (vals.ndim - 1))
    return np.sum(vals * weights, axis=0) / spec.m_nodes


def kth_differential(f, x, dirs, spec: ContourSpec, vectorized: bool = True) -> np.ndarray:
    """k-th differential ``d^k f(x)[u_1, ..., u_k]`` by the iterated Cauchy formula.

    Each ``zeta_i`` runs over the circle of radius ``spec.radius``; the
    weight ``prod zeta_i^{-2}`` and the circle measure combine so that the
    result does not depend on the radius when ``f`` is holomorphic on the
    polydisk ``x + sum D(r) u_i``.

    ``x`` may carry leading batch axes, shape ``(..., n)``; each direction
    must broadcast against it. ``f`` then receives points of shape
    ``(..., m^k, n)``.
    """
    dirs = list(dirs)
    k = len(dirs)
    if k > MAX_ORDER:
        raise ParameterError(f"differential order k={k} exceeds the cap {MAX_ORDER}")
    if not vectorized:
        f = _pointwise(f)
    x = np.asarray(x, dtype=complex)
    if k == 0:
        val = np.asarray(f(x[..., None, :]), dtype=complex)[..., 0, :]
        _check_finite(val, lambda idx: 0j)
        return val

    m, r = spec.m_nodes, spec.radius
    w = circle_nodes(m)
    combos = np.array(list(itertools.product(range(m), repeat=k)))  # (m^k, k)
    wk = w[combos]  # (m^k, k)
    weight = np.prod(1.0 / wk, axis=1)  # zeta^-2 times the measure factor zeta
    shift = 0
    for i, u in enumerate(dirs):
        u = np.asarray(u, dtype=complex)
        shift = shift + (r * wk[:, i])[:, None] * u[..., None, :]
    points = x[..., None, :] + shift
    vals = np.asarray(f(points), dtype=complex)
    _check_finite(vals, lambda idx: tuple(complex(r * z) for z in wk[idx[-2]]))
    # the weights sum to zero, so removing f(x) changes nothing but rounding;
    # it makes zero directions give exactly zero
    center = np.asarray(f(x[..., None, :]), dtype=complex)
    _check_finite(center, lambda idx: 0j)
    total = np.sum((vals - center) * weight[:, None], axis=-2) / m**k
    return total / r**k


def mean_value_check(f, x, u, spec: ContourSpec, p: float = 2.0, vectorized: bool = True) -> float:
    """Order-zero Cauchy consistency residual of ``f`` along the disk ``x + D(r) u``.

    Returns the larger of two norms, both zero for holomorphic ``f``:

    * ``|oint zeta^-1 f(x + zeta u) dzeta - f(x)|`` (Cauchy reproduction),
    * ``|circle_integral(zeta -> f(x + zeta u))|`` (Cauchy-Goursat).

    The first alone is blind to harmonic maps such as ``conj``; the second
    picks up their ``zeta^-1`` coefficient.
    """
    if not vectorized:
        f = _pointwise(f)
    x = np.asarray(x, dtype=complex)
    u = np.asarray(u, dtype=complex)
    m, r = spec.m_nodes, spec.radius
    w = circle_nodes(m)
    points = x[None, :] + (r * w)[:, None] * u[None, :]
    vals = np.asarray(f(points), dtype=complex)
    _check_finite(vals, lambda idx: complex(r * w[idx[0]]))
    center = np.asarray(f(x[None, :]), dtype=complex)[0]
    reproduction = np.mean(vals, axis=0) - center
    goursat = np.sum(vals * w[:, None], axis=0) / m
    return float(max(norm(reproduction, p), norm(goursat, p)))
