"""Picard solution of ``y' = phi(t, y)``, ``y(t0) = xi`` and its sensitivities.

The solution map ``(xi, phi) -> y`` is holomorphic; its derivative in a
direction ``(dxi, dphi)`` solves the variational equation
``v' = a(t) v + dphi(t, y(t))``, ``v(t0) = dxi`` with
``a(t) = d_xi phi(t, y(t))``. Both equations are solved by the same
fixed-point iteration ``y -> xi + int_{t0} phi o [id, y]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contour import ContourSpec, kth_differential
from .errors import ConvergenceError, DomainError, ParameterError
from .fieldexpr import Field
from .lincomplex import Curve, Grid, cvector, norm, sup_norm, unit_directions
from .superpose import partial2_apply, superpose

__all__ = [
    "SolveReport",
    "antiderivative",
    "condition_P",
    "tube_sup",
    "contraction_estimate",
    "picard_solve",
    "rk4_solve",
    "lipschitz_bound",
    "solution_map_derivative",
    "a_hat_continuity_probe",
]

LADDER_RUNGS = 8
LADDER_RATIO = 0.7
TUBE_DIRECTIONS = 32
TUBE_RADII = (0.25, 0.5, 0.75, 1.0)
NOISE_FLOOR = 1e-13


@dataclass(frozen=True)
class SolveReport:
    solution: Curve
    iterations: int
    contraction: float
    residual: float
    condition_ok: bool
    B1: float
    tube_sup: float
    distances: tuple = field(default=(), repr=False)

    @property
    def observed_ratio(self) -> float:
        """Largest ratio of successive iterate distances above the rounding floor."""
        d = np.asarray(self.distances)
        ratios = [d[k + 1] / d[k] for k in range(len(d) - 1) if d[k + 1] > NOISE_FLOOR]
        return float(max(ratios)) if ratios else 0.0


def _cumulative_right(f: np.ndarray, c: int, h: float) -> np.ndarray:
    """Integrals from node ``c`` to every node ``c..m-1`` (composite Simpson).

    Even offsets use Simpson pairs; an odd offset adds one interval
    integrated with the quadratic through three neighboring nodes.
    """
    m = f.shape[0]
    out = np.zeros((m - c,) + f.shape[1:], dtype=complex)
    for k in range(2, m - c, 2):
        j = c + k
        out[k] = out[k - 2] + h / 3 * (f[j - 2] + 4 * f[j - 1] + f[j])
    for k in range(1, m - c, 2):
        j = c + k  # interval [j-1, j]
        if j + 1 < m:
            piece = h / 12 * (5 * f[j - 1] + 8 * f[j] - f[j + 1])
        else:
            piece = h / 12 * (-f[j - 2] + 8 * f[j - 1] + 5 * f[j])
        out[k] = out[k - 1] + piece
    return out


def antiderivative(v: Curve) -> Curve:
    """The curve ``t -> int_{t0}^t v(s) ds``; zero at ``t0``, signed for ``t < t0``.

    The result carries ``v`` as its derivative samples.
    """
    grid = v.grid
    c, h = grid.center_index, grid.h
    f = np.asarray(v.values)
    out = np.zeros_like(f)
    out[c:] = _cumulative_right(f, c, h)
    out[: c + 1] = -_cumulative_right(f[::-1], c, h)[::-1]
    out[c] = 0
    return Curve(grid, out, f)


def _ladder(phi: Field, xi):
    gap = float(phi.domain.margin(xi))
    top = 0.9 * gap
    return [top * LADDER_RATIO**k for k in range(LADDER_RUNGS)]


def tube_sup(phi: Field, xi, B1: float, m_grid: int = 201, directions: int = TUBE_DIRECTIONS) -> float:
    """Sampled sup of ``|phi|`` over ``{(t, xi + xi1) : t in I, |xi1| < B1}``.

    Samples: grid nodes x ``directions`` unit vectors x the radii
    :data:`TUBE_RADII` (fractions of ``B1``), plus the axis ``xi`` itself.
    """
    xi = cvector(xi)
    box = phi.domain
    grid = Grid(box.interval, m_grid)
    dirs = unit_directions(xi.size, directions, box.norm_p)
    offsets = np.concatenate([np.zeros((1, xi.size))] + [r * B1 * dirs for r in TUBE_RADII])
    pts = xi + offsets  # (S, n)
    vals = phi(grid.nodes[:, None], pts[None, :, :])
    return float(np.max(norm(vals, box.norm_p)))


def condition_P(phi: Field, xi, m_grid: int = 201) -> tuple[bool, float]:
    """Decide the existence condition ``sup |phi| < B1 / (2A)`` on a tube of radius ``B1``.

    ``B1`` runs down a geometric ladder starting at 0.9 times the distance
    from ``xi`` to the domain boundary. Returns ``(True, B1)`` for the first
    rung that passes, else ``(False, B1)`` for the rung that came closest.
    """
    xi = cvector(xi)
    box = phi.domain
    if box.margin(xi) <= 0 or not box.interval.contains(box.interval.t0):
        return False, 0.0
    A = box.interval.A
    best, best_ratio = 0.0, math.inf
    for B1 in _ladder(phi, xi):
        M = tube_sup(phi, xi, B1, m_grid)
        if M < 0.5 * B1 / A:
            return True, B1
        ratio = A * M / B1
        if ratio < best_ratio:
            best, best_ratio = B1, ratio
    return False, best


def contraction_estimate(A: float, M: float, B1: float) -> float:
    """Lipschitz factor ``A M / eps`` of the Picard map with the widest admissible ``eps``.

    Iterates stay within ``R = A M`` of ``xi``; the Cauchy estimate on the
    remaining ``eps = B1 - R`` gives ``|d phi| <= M / eps``.
    """
    R = A * M
    if R >= B1:
        return math.inf
    return R / (B1 - R)


def picard_solve(
    phi: Field,
    xi,
    tol: float = 1e-12,
    max_iter: int = 100,
    m_grid: int = 201,
    B1: float | None = None,
) -> SolveReport:
    """Fixed-point iteration ``y <- xi + int_{t0} phi o [id, y]`` from ``y = xi``.

    Stops when successive iterates differ by less than ``tol`` in sup norm.
    ``B1`` overrides the ladder search of :func:`condition_P`; the iteration
    is attempted whatever the verdict.
    """
    xi = cvector(xi)
    box = phi.domain
    if xi.size != phi.dim:
        raise ParameterError(f"initial value has dimension {xi.size}, field has {phi.dim}")
    A, p = box.interval.A, box.norm_p
    if B1 is None:
        ok, B1 = condition_P(phi, xi, m_grid)
        M = tube_sup(phi, xi, B1, m_grid) if B1 > 0 else math.inf
    else:
        M = tube_sup(phi, xi, B1, m_grid)
        ok = bool(M < 0.5 * B1 / A) and B1 <= box.margin(xi)
    contraction = contraction_estimate(A, M, B1) if B1 > 0 else math.inf

    grid = Grid(box.interval, m_grid)
    start = Curve.constant(grid, xi)
    y = start
    distances = []
    for k in range(1, max_iter + 1):
        y_new = start + antiderivative(superpose(phi, y))
        d = sup_norm(y_new - y, p)
        distances.append(d)
        y = y_new
        if d < tol:
            break
    else:
        raise ConvergenceError(
            f"Picard iteration did not reach tol={tol:g} in {max_iter} steps "
            f"(last step {distances[-1]:.3g}, contraction estimate {contraction:.3g})",
            contraction=contraction,
            iterations=max_iter,
        )
    rhs = superpose(phi, y)
    residual = sup_norm(y - start - antiderivative(rhs), p)
    solution = Curve(grid, y.values, rhs.values)
    return SolveReport(solution, k, contraction, residual, bool(ok), float(B1), M, tuple(distances))


def rk4_solve(phi: Field, xi, steps: int = 200) -> Curve:
    """Classical fourth-order Runge-Kutta on the uniform grid, outward from ``t0``.

    ``steps`` is the number of grid intervals over the whole of ``I`` and
    must be even so that ``t0`` is a node.
    """
    if steps < 2 or steps % 2:
        raise ParameterError(f"steps must be even and >= 2, got {steps}")
    xi = cvector(xi)
    grid = Grid(phi.domain.interval, steps + 1)
    c, h = grid.center_index, grid.h
    nodes = grid.nodes
    vals = np.empty((grid.m_grid, xi.size), dtype=complex)
    vals[c] = xi

    def rhs(t, y):
        return phi(t, y)

    for sign in (1, -1):
        y = xi.copy()
        for k in range(c):
            j = c + sign * k
            t = nodes[j]
            dt = sign * h
            k1 = rhs(t, y)
            k2 = rhs(t + dt / 2, y + dt / 2 * k1)
            k3 = rhs(t + dt / 2, y + dt / 2 * k2)
            k4 = rhs(nodes[j + sign], y + dt * k3)
            y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            vals[j + sign] = y
    return Curve(grid, vals, phi(nodes, vals))


def lipschitz_bound(phi: Field, at, delta0: float, spec: ContourSpec = ContourSpec()) -> float:
    """Local Lipschitz constant of ``phi`` in the state near ``at = (t, xi)``.

    ``delta0^-1 max |oint zeta^-2 phi(t1, xi4 + zeta xi3) dzeta|`` over
    ``t1`` in ``t + delta0 {-1, 0, 1}``, ``xi4`` within ``delta0`` of ``xi``
    and 16 directions ``|xi3| = delta0``. The samples stay in the ball of
    radius ``2 delta0`` about ``xi``, which must lie inside the domain.
    """
    t, xi = float(at[0]), cvector(at[1])
    box = phi.domain
    if not delta0 > 0:
        raise ParameterError(f"delta0 must be positive, got {delta0}")
    if box.margin(xi) < 2 * delta0:
        raise DomainError(
            f"ball of radius 2*delta0={2 * delta0:.3g} about xi leaves the domain",
            t=t,
            distance=float(box.distance(xi)),
        )
    iv = box.interval
    ts = np.unique(np.clip(t + delta0 * np.array([-1.0, 0.0, 1.0]), iv.lo, iv.hi))
    n = xi.size
    dirs = unit_directions(n, 16, box.norm_p)
    centers = np.concatenate([xi[None, :], xi + 0.5 * delta0 * dirs[:8], xi + delta0 * dirs[:8]])
    spec = spec.with_radius(min(spec.radius, 1.0))
    x4 = np.broadcast_to(centers[None, :, None, :], (ts.size, centers.shape[0], dirs.shape[0], n))
    x3 = (delta0 * dirs)[None, None, :, :]
    tt = ts.reshape(-1, 1, 1, 1)
    vals = kth_differential(lambda pts: phi(tt, pts), x4, [x3], spec)
    return float(np.max(norm(vals, box.norm_p))) / delta0


def solution_map_derivative(
    phi: Field,
    xi,
    y: Curve,
    dxi,
    dphi: Field | None = None,
    spec: ContourSpec = ContourSpec(),
    tol: float = 1e-13,
    max_iter: int = 200,
) -> Curve:
    """Directional derivative of ``(xi, phi) -> y`` in direction ``(dxi, dphi)``.

    Solves ``v' = a v + dphi o [id, y]``, ``v(t0) = dxi`` by iterating
    ``v <- dxi + int_{t0} (a.v + dphi o [id, y])``, where ``a.v`` comes from
    :func:`~holocurve.superpose.partial2_apply`. ``dphi=None`` is the zero
    field.
    """
    xi, dxi = cvector(xi), cvector(dxi)
    c = y.grid.center_index
    if not np.allclose(y.values[c], xi, rtol=0, atol=1e-12 * max(1.0, float(norm(xi)))):
        raise ParameterError("y(t0) does not match xi")
    p = phi.domain.norm_p
    grid = y.grid
    if dphi is None:
        forcing = np.zeros_like(y.values)
    else:
        forcing = superpose(dphi, y).values
    start = Curve.constant(grid, dxi)
    v = start
    for _ in range(max_iter):
        rhs = Curve(grid, partial2_apply(phi, y, v, spec).values + forcing)
        v_new = start + antiderivative(rhs)
        d = sup_norm(v_new - v, p)
        v = v_new
        if d < tol * max(1.0, sup_norm(v, p)):
            break
    else:
        raise ConvergenceError(
            f"variational iteration did not reach tol={tol:g} in {max_iter} steps", iterations=max_iter
        )
    rhs = partial2_apply(phi, y, v, spec).values + forcing
    return Curve(grid, v.values, rhs)


def a_hat_continuity_probe(phi: Field, y: Curve, spec: ContourSpec = ContourSpec(), directions: int = 16) -> float:
    """Largest change of ``a(t) = d_xi phi(t, y(t))`` between adjacent grid nodes.

    Operator differences are estimated on ``directions`` unit vectors. For a
    field Lipschitz in ``t`` the probe scales with the grid spacing.
    """
    p = phi.domain.norm_p
    worst = 0.0
    for e in unit_directions(y.dim, directions, p):
        ae = partial2_apply(phi, y, Curve.constant(y.grid, e), spec).values
        worst = max(worst, float(np.max(norm(np.diff(ae, axis=0), p))))
    return worst
