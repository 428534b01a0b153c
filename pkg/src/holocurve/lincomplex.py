"""Complex vectors, intervals, grids and discretized curves.

A point of the state space is a 1-D ``complex128`` array of length ``n``
(see :func:`cvector`); batches of points carry the state index on the last
axis. Curves live on uniform grids with an odd node count so that the
interval center ``t0`` is always a node.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError

__all__ = [
    "cvector",
    "norm",
    "Interval",
    "Grid",
    "Curve",
    "Box",
    "sup_norm",
    "eval_curve",
    "unit_directions",
]


def cvector(entries) -> np.ndarray:
    """Return ``entries`` as a fresh 1-D complex array."""
    v = np.array(entries, dtype=complex).reshape(-1)
    return v


def _check_p(p):
    if not (1.0 <= p < np.inf):
        raise ParameterError(f"norm exponent p must satisfy 1 <= p < inf, got {p!r}")


def norm(v, p: float = 2.0):
    """l^p norm over the last axis: ``(sum |v_i|^p)^(1/p)``.

    Works on a single vector or on a batch of shape ``(..., n)``.
    """
    _check_p(p)
    a = np.abs(np.asarray(v, dtype=complex))
    if p == 1.0:
        return a.sum(axis=-1)
    if p == 2.0:
        with np.errstate(over="ignore", under="ignore"):
            out = np.sqrt((a * a).sum(axis=-1))
        if not np.all(np.isfinite(a)):
            return out
        # squares overflow above ~1e154 and underflow below ~1e-154
        big = a.max(axis=-1) if a.shape[-1] else np.zeros(a.shape[:-1])
        if np.all(np.isfinite(out) & ((out > 0) | (big == 0)) & (big < 1e150) & ((big > 1e-150) | (big == 0))):
            return out
    # scale by the max entry so large exponents do not overflow
    m = a.max(axis=-1, keepdims=True) if a.shape[-1] else np.zeros(a.shape[:-1] + (1,))
    safe = np.where(m > 0, m, 1.0)
    s = ((a / safe) ** p).sum(axis=-1) ** (1.0 / p)
    return np.squeeze(m, axis=-1) * s


@dataclass(frozen=True)
class Interval:
    """The compact interval ``[t0 - A, t0 + A]``."""

    t0: float
    A: float

    def __post_init__(self):
        if not self.A > 0:
            raise ParameterError(f"half-width A must be positive, got {self.A!r}")
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "A", float(self.A))

    @property
    def lo(self) -> float:
        return self.t0 - self.A

    @property
    def hi(self) -> float:
        return self.t0 + self.A

    def contains(self, t, slack: float = 1e-12) -> bool:
        tol = slack * max(1.0, self.A, abs(self.t0))
        return bool(np.all((self.lo - tol <= np.asarray(t)) & (np.asarray(t) <= self.hi + tol)))


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``m_grid`` nodes covering an interval, endpoints included."""

    interval: Interval
    m_grid: int = 201
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = int(self.m_grid)
        if m < 3 or m % 2 == 0:
            raise ParameterError(f"m_grid must be odd and >= 3, got {self.m_grid!r}")
        object.__setattr__(self, "m_grid", m)
        nodes = self.interval.t0 + self.interval.A * np.linspace(-1.0, 1.0, m)
        nodes[m // 2] = self.interval.t0
        nodes.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)

    @property
    def h(self) -> float:
        return 2.0 * self.interval.A / (self.m_grid - 1)

    @property
    def center_index(self) -> int:
        return self.m_grid // 2

    def refined(self) -> "Grid":
        """Grid on the same interval with every spacing halved."""
        return Grid(self.interval, 2 * self.m_grid - 1)


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Curve:
    """Samples of a continuous curve ``I -> C^n`` on a grid.

    ``values`` has shape ``(m_grid, n)``. When ``derivs`` is present (same
    shape) the curve stands for a C^1 function.
    """

    grid: Grid
    values: np.ndarray
    derivs: np.ndarray | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.ndim != 2 or vals.shape[0] != self.grid.m_grid:
            raise ParameterError(
                f"values must have shape (m_grid={self.grid.m_grid}, n), got {vals.shape}"
            )
        object.__setattr__(self, "values", _frozen(vals))
        if self.derivs is not None:
            d = np.asarray(self.derivs, dtype=complex).reshape(vals.shape)
            object.__setattr__(self, "derivs", _frozen(d))

    @classmethod
    def from_function(cls, grid: Grid, fn, deriv=None) -> "Curve":
        """Sample ``fn(t)`` (vectorized over a 1-D array of times) on ``grid``."""
        t = grid.nodes
        vals = np.asarray(fn(t), dtype=complex)
        if vals.ndim == 1:
            vals = vals[:, None]
        d = None if deriv is None else np.asarray(deriv(t), dtype=complex).reshape(vals.shape)
        return cls(grid, vals, d)

    @classmethod
    def constant(cls, grid: Grid, value) -> "Curve":
        v = cvector(value)
        return cls(grid, np.broadcast_to(v, (grid.m_grid, v.size)), np.zeros((grid.m_grid, v.size)))

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    def _same_grid(self, other):
        if not isinstance(other, Curve):
            return NotImplemented
        if self.grid != other.grid or self.dim != other.dim:
            raise ParameterError("curves live on different grids or spaces")
        return None

    def __add__(self, other):
        if self._same_grid(other) is NotImplemented:
            return NotImplemented
        d = None
        if self.derivs is not None and other.derivs is not None:
            d = self.derivs + other.derivs
        return Curve(self.grid, self.values + other.values, d)

    def __sub__(self, other):
        if self._same_grid(other) is NotImplemented:
            return NotImplemented
        d = None
        if self.derivs is not None and other.derivs is not None:
            d = self.derivs - other.derivs
        return Curve(self.grid, self.values - other.values, d)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        d = None if self.derivs is None else scalar * self.derivs
        return Curve(self.grid, scalar * self.values, d)

    __rmul__ = __mul__

    def __neg__(self):
        return -1 * self

    def at(self, t) -> np.ndarray:
        return eval_curve(self, t)


def sup_norm(c: Curve, p: float = 2.0) -> float:
    """Maximum over the grid nodes of the l^p norm of the samples."""
    if c.values.size == 0:
        raise ParameterError("empty curve")
    return float(np.max(norm(c.values, p)))


def eval_curve(c: Curve, t: float) -> np.ndarray:
    """Value of ``c`` at ``t`` by cubic interpolation through the four nearest nodes.

    Exact at nodes; reproduces polynomials of degree <= 3.
    """
    grid = c.grid
    if not grid.interval.contains(t):
        raise DomainError(f"t={t!r} outside [{grid.interval.lo}, {grid.interval.hi}]", t=t)
    m = grid.m_grid
    s = (float(t) - grid.interval.lo) / grid.h
    k = int(round(s))
    if abs(s - k) < 1e-12:
        return np.array(c.values[min(max(k, 0), m - 1)])
    width = min(4, m)
    start = int(np.floor(s)) - (width // 2 - 1)
    start = min(max(start, 0), m - width)
    idx = np.arange(start, start + width)
    xs = idx - s  # node offsets in units of h
    weights = np.empty(width)
    for j in range(width):
        others = np.delete(xs, j)
        weights[j] = np.prod(others) / np.prod(others - xs[j])
    return weights @ c.values[idx]


@dataclass(frozen=True, eq=False)
class Box:
    """The domain ``I x B(center, radius)`` in the l^p norm."""

    interval: Interval
    center: np.ndarray
    radius: float
    norm_p: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(cvector(self.center)))
        if not self.radius > 0:
            raise ParameterError(f"radius must be positive, got {self.radius!r}")
        object.__setattr__(self, "radius", float(self.radius))
        _check_p(self.norm_p)
        object.__setattr__(self, "norm_p", float(self.norm_p))

    def __eq__(self, other):
        if not isinstance(other, Box):
            return NotImplemented
        return (
            self.interval == other.interval
            and self.radius == other.radius
            and self.norm_p == other.norm_p
            and np.array_equal(self.center, other.center)
        )

    def __hash__(self):
        return hash((self.interval, self.radius, self.norm_p, self.center.tobytes()))

    @property
    def dim(self) -> int:
        return self.center.size

    def distance(self, xi):
        """Norm distance of ``xi`` (or a batch of points) from the center."""
        return norm(np.asarray(xi) - self.center, self.norm_p)

    def margin(self, xi):
        """``radius - distance``; positive inside the open ball."""
        return self.radius - self.distance(xi)


def unit_directions(n: int, count: int, p: float = 2.0, seed: int = 20240917) -> np.ndarray:
    """``count`` deterministic unit vectors (l^p norm) in ``C^n``.

    For ``n == 1`` these are the ``count``-th roots of unity. Otherwise the
    real and imaginary coordinate axes (both signs) come first, then
    normalized complex Gaussian samples from a fixed seed.
    """
    if n == 1:
        j = np.arange(count)
        return np.exp(2j * np.pi * j / count)[:, None]
    eye = np.eye(n, dtype=complex)
    axes = np.concatenate([eye, 1j * eye, -eye, -1j * eye])
    if count <= len(axes):
        return axes[:count]
    rng = np.random.default_rng(seed)
    extra = rng.standard_normal((count - len(axes), n)) + 1j * rng.standard_normal((count - len(axes), n))
    extra /= norm(extra, p)[:, None]
    return np.concatenate([axes, extra])
