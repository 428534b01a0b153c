"""The superposition map ``(x, y) -> x o [id, y]`` and its contour derivatives.

``x`` is a :class:`~holocurve.fieldexpr.Field` and ``y`` a
:class:`~holocurve.lincomplex.Curve`; the composite is the curve
``t -> x(t, y(t))``. The partial derivative in the state slot,
``a . v : t -> d_xi x(t, y(t)) v(t)``, is never formed symbolically. It is
read off a scaled Cauchy integral whose samples stay inside a certified
tube around the graph of ``y`` (see :func:`safety_radius`).

Contour radii passed in a :class:`~holocurve.contour.ContourSpec` are
fractions of that certified radius and must lie in ``(0, 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contour import ContourSpec, kth_differential
from .errors import DegenerateDomainError, DomainError, ParameterError
from .fieldexpr import Field
from .lincomplex import Box, Curve, sup_norm

__all__ = [
    "SAFETY_FACTOR",
    "superpose",
    "safety_radius",
    "partial2_apply",
    "partial2_second",
    "remainder_norm",
    "RemainderStudy",
    "remainder_decay",
]

SAFETY_FACTOR = 0.9
DIRECTIONS = (1, 1j, -1, -1j)


def superpose(x: Field, y: Curve) -> Curve:
    """Curve ``t -> x(t, y(t))`` sampled on the grid of ``y``."""
    try:
        vals = x(y.grid.nodes, y.values)
    except DomainError as exc:
        raise DomainError(f"graph of y escapes the field domain: {exc}", exc.t, exc.distance) from None
    return Curve(y.grid, vals)


def safety_radius(y: Curve, box: Box) -> float:
    """Radius ``eps`` of a tube around the graph of ``y`` that stays inside ``box``.

    The minimum over the grid of the distance to the ball boundary, shrunk
    by :data:`SAFETY_FACTOR` to cover what happens between nodes.
    """
    iv, giv = box.interval, y.grid.interval
    tol = 1e-12 * max(1.0, iv.A)
    if giv.lo < iv.lo - tol or giv.hi > iv.hi + tol:
        raise DomainError(
            f"curve interval [{giv.lo}, {giv.hi}] not inside [{iv.lo}, {iv.hi}]", t=giv.lo
        )
    margins = box.margin(y.values)
    k = int(np.argmin(margins))
    if margins[k] <= 0:
        t = float(y.grid.nodes[k])
        raise DegenerateDomainError(
            f"graph of y touches or leaves the domain at t={t:.6g}",
            t=t,
            distance=float(box.distance(y.values[k])),
        )
    return SAFETY_FACTOR * float(margins[k])


def _relative(spec: ContourSpec) -> ContourSpec:
    if spec.radius > 1:
        raise ParameterError(
            f"contour radius {spec.radius} is a fraction of the certified radius and must be <= 1"
        )
    return spec


def _state_map(x: Field, nodes, extra_axes: int):
    t = nodes.reshape((-1,) + (1,) * extra_axes)
    return lambda pts: x(t, pts)


def partial2_apply(x: Field, y: Curve, v: Curve, spec: ContourSpec = ContourSpec()) -> Curve:
    """``t -> d_xi x(t, y(t)) . v(t)`` by the scaled contour formula.

    With ``d0 = safety_radius / max(1, |v|)`` every sample
    ``y(t) + zeta d0 v(t)`` lies in the certified tube, and
    ``a.v(t) = d0^-1 oint zeta^-2 x(t, y(t) + zeta d0 v(t)) dzeta``.
    """
    spec = _relative(spec)
    eps = safety_radius(y, x.domain)
    d0 = eps / max(1.0, sup_norm(v, x.domain.norm_p))
    f = _state_map(x, y.grid.nodes, 1)
    vals = kth_differential(f, y.values, [d0 * v.values], spec) / d0
    return Curve(y.grid, vals)


def partial2_second(
    x: Field, y: Curve, v: Curve, w: Curve, spec: ContourSpec = ContourSpec()
) -> Curve:
    """``t -> d^2_xi x(t, y(t)) [v(t), w(t)]`` by a double scaled contour."""
    spec = _relative(spec)
    eps = safety_radius(y, x.domain)
    p = x.domain.norm_p
    d0 = eps / (max(1.0, sup_norm(v, p)) + max(1.0, sup_norm(w, p)))
    f = _state_map(x, y.grid.nodes, 1)
    vals = kth_differential(f, y.values, [d0 * v.values, d0 * w.values], spec) / d0**2
    return Curve(y.grid, vals)


def remainder_norm(
    x: Field, u: Field, y: Curve, v: Curve, t: complex, spec: ContourSpec = ContourSpec()
) -> float:
    """Sup norm of the directional-derivative remainder at complex increment ``t``.

    The remainder is::

        t^-1 (f(x + t u, y + t v) - f(x, y)) - u o [id, y] - a . v

    with ``f(x, y) = x o [id, y]`` and ``a = d_xi x o [id, y]``. It is
    assembled as ``t^-1 (x o [id, y+tv] - x o [id, y]) + (u o [id, y+tv] - u o [id, y]) - a.v``
    so that ``u`` is never multiplied by ``t`` and divided again.
    """
    t = complex(t)
    if t == 0:
        raise ParameterError("increment t must be nonzero")
    p = x.domain.norm_p
    step = abs(t) * sup_norm(v, p)
    for box, name in ((x.domain, "x"), (u.domain, "u")):
        eps = safety_radius(y, box)
        if step >= eps:
            raise DomainError(
                f"|t| * |v| = {step:.3g} exceeds the safety radius {eps:.3g} of {name}",
                distance=step,
            )
    moved = y + t * v
    dx = (superpose(x, moved).values - superpose(x, y).values) / t
    du = superpose(u, moved).values - superpose(u, y).values
    av = partial2_apply(x, y, v, spec).values
    return sup_norm(Curve(y.grid, dx + du - av), p)


@dataclass(frozen=True)
class RemainderStudy:
    """Remainders along dyadic rays ``t = 2^-j t0 * direction``."""

    moduli: np.ndarray  # |t| per level, shape (levels,)
    remainders: np.ndarray  # shape (len(directions), levels)
    directions: tuple

    @property
    def orders(self) -> np.ndarray:
        """Least-squares slope of log remainder against log |t|, per direction."""
        lt = np.log(self.moduli)
        out = []
        for r in self.remainders:
            out.append(np.polyfit(lt, np.log(np.maximum(r, 1e-300)), 1)[0])
        return np.array(out)

    @property
    def order(self) -> float:
        return float(np.min(self.orders))

    @property
    def ratio_bound(self) -> float:
        """``max remainder / |t|`` over all samples."""
        return float(np.max(self.remainders / self.moduli))


def remainder_decay(
    x: Field,
    u: Field,
    y: Curve,
    v: Curve,
    t0: float,
    spec: ContourSpec = ContourSpec(),
    levels: int = 9,
    directions=DIRECTIONS,
) -> RemainderStudy:
    """Evaluate :func:`remainder_norm` at ``t = 2^-j t0 d`` for ``j < levels``."""
    moduli = abs(t0) * 2.0 ** -np.arange(levels)
    rem = np.array([[remainder_norm(x, u, y, v, s * d, spec) for s in moduli] for d in directions])
    return RemainderStudy(moduli, rem, tuple(directions))
