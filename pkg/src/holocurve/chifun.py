"""An entire function on (truncated) l^p that is unbounded on the unit ball.

``chi(x) = sum_i i * x_i^i`` over indices ``i = 0, 1, ..., n-1``. Its
variation is ``dchi(x, u) = sum_i i^2 x_i^(i-1) u_i``. Along the unit
vectors ``x = t e_i`` the value ``i t^i`` is unbounded as ``i`` grows with
``t < 1``, although ``chi`` is holomorphic everywhere.

The two bound checks evaluate explicit inequalities for
``|chi(x+u) - chi(x)|`` and for the first-order remainder
``Delta(t) = sum_i i |t^-1((x_i + t u_i)^i - x_i^i) - i x_i^(i-1) u_i|``.
Both differences are expanded binomially so that no term is obtained by
subtracting two nearly equal large numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .lincomplex import cvector, norm

__all__ = [
    "TAIL_CUTOFF",
    "chi",
    "chi_map",
    "dchi",
    "unboundedness_witness",
    "tail_index",
    "ContinuityCheck",
    "RemainderCheck",
    "continuity_bound_check",
    "remainder_bound_check",
    "remainder_delta",
]

TAIL_CUTOFF = 1 / 8


def chi(x) -> complex:
    """``sum_i i x_i^i``; the ``i = 0`` term is zero."""
    x = cvector(x)
    n = x.size
    i = np.arange(n)
    return complex(np.sum(i * _power_table(x, n + 1)[i, i]))


def chi_map(points) -> np.ndarray:
    """Batched ``chi`` over the last axis; returns shape ``(..., 1)``."""
    pts = np.asarray(points, dtype=complex)
    out = np.zeros(pts.shape[:-1], dtype=complex)
    for i in range(1, pts.shape[-1]):
        out = out + i * pts[..., i] ** i
    return out[..., None]


def dchi(x, u) -> complex:
    """Directional derivative ``sum_{i>=1} i^2 x_i^(i-1) u_i``."""
    x, u = cvector(x), cvector(u)
    if x.size != u.size:
        raise ParameterError("x and u differ in length")
    i = np.arange(1, x.size)
    X = _power_table(x, x.size)
    return complex(np.sum(i**2 * X[i, i - 1] * u[1:]))


def unboundedness_witness(target: float, n: int):
    """A point ``x`` with ``|x| < 1`` (any l^p) and ``|chi(x)| > target``.

    Uses ``x = (1 - 1/i) e_i`` with the largest index ``i = n - 1``, where
    ``chi(x) = i (1 - 1/i)^i`` is greatest; that value grows like ``i / e``.
    Returns ``(x, chi(x))``.
    """
    i = n - 1
    if i < 2 or i * (1 - 1 / i) ** i <= target:
        need = math.ceil(math.e * target) + 1
        raise ParameterError(
            f"target {target} unreachable in dimension {n}; need n of about {need}"
        )
    x = np.zeros(n, dtype=complex)
    x[i] = 1 - 1 / i
    return x, chi(x)


def tail_index(*vectors) -> int:
    """Least ``N`` with ``|v_i| < 1/8`` for every given vector and every ``i >= N``."""
    big = np.zeros(cvector(vectors[0]).size, dtype=bool)
    for v in vectors:
        big |= np.abs(cvector(v)) >= TAIL_CUTOFF
    hits = np.flatnonzero(big)
    return int(hits[-1]) + 1 if hits.size else 0


def _binom_rows(n: int) -> np.ndarray:
    """``C[i, k] = binomial(i, k)`` for ``0 <= k <= i < n`` as floats."""
    C = np.zeros((n, n))
    for i in range(n):
        for k in range(i + 1):
            C[i, k] = math.comb(i, k)
    return C


def _power_table(z: np.ndarray, n: int) -> np.ndarray:
    """``P[i, k] = z_i^k`` for ``k < n``."""
    P = np.ones((z.size, n), dtype=complex)
    for k in range(1, n):
        P[:, k] = P[:, k - 1] * z
    return P


def _difference(x: np.ndarray, u: np.ndarray) -> complex:
    """``chi(x + u) - chi(x)`` via ``(a+b)^i - a^i = sum_{k>=1} C(i,k) a^(i-k) b^k``."""
    n = x.size
    C = _binom_rows(n)
    X, U = _power_table(x, n), _power_table(u, n)
    total = 0j
    for i in range(1, n):
        k = np.arange(1, i + 1)
        total += i * np.sum(C[i, k] * X[i, i - k] * U[i, k])
    return total


def remainder_delta(x, u, t: complex) -> float:
    """``Delta(t) = sum_i i |t^-1((x_i + t u_i)^i - x_i^i) - i x_i^(i-1) u_i|``.

    Computed as ``sum_i i |sum_{k>=2} C(i,k) x_i^(i-k) u_i^k t^(k-1)|``.
    """
    x, u = cvector(x), cvector(u)
    n = x.size
    C = _binom_rows(n)
    X, U = _power_table(x, n), _power_table(u, n)
    T = _power_table(np.array([complex(t)]), n)[0]
    total = 0.0
    for i in range(2, n):
        k = np.arange(2, i + 1)
        total += i * abs(np.sum(C[i, k] * X[i, i - k] * U[i, k] * T[k - 1]))
    return float(total)


@dataclass(frozen=True)
class ContinuityCheck:
    lhs: float
    rhs: float
    ok: bool
    N: int
    M: float

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.ok))


@dataclass(frozen=True)
class RemainderCheck:
    delta: float
    worst_ratio: float
    ok: bool
    N: int
    M: float

    def __iter__(self):
        return iter((self.delta, self.worst_ratio, self.ok))


def continuity_bound_check(x, u, p: float = 2.0) -> ContinuityCheck:
    """Check ``|chi(x+u) - chi(x)| <= |u| (N^3 M^(N-2) + 2^(3-N) (1+N))``.

    Here ``M = 1 + |x|`` and ``N`` is the least index past which
    ``|x_i| < 1/8``. Requires ``|u| < 1/8``. Unpacks as ``(lhs, rhs, ok)``.
    """
    x, u = cvector(x), cvector(u)
    if x.size != u.size:
        raise ParameterError("x and u differ in length")
    nu = float(norm(u, p))
    if not nu < TAIL_CUTOFF:
        raise ParameterError(f"|u| = {nu:.4g} must be below 1/8")
    N = tail_index(x)
    M = 1.0 + float(norm(x, p))
    head = N**3 * M ** (N - 2) if N else 0.0
    rhs = nu * (head + 2.0 ** (3 - N) * (1 + N))
    lhs = abs(_difference(x, u))
    return ContinuityCheck(lhs, rhs, bool(lhs <= rhs), N, M)


def remainder_bound_check(x, u, eps: float, p: float = 2.0) -> RemainderCheck:
    """Check that ``delta = min(1, eps / (M^2 (N^3 M^N + 2^7 (1+N))))`` keeps ``Delta(t) < eps``.

    ``M = 1 + |x| + |u|`` and ``N`` is the least index past which both
    ``|x_i|`` and ``|u_i|`` are below 1/8. ``Delta`` is sampled at 16 points
    on the circle ``|t| = delta/2`` and on 8 rays at ``|t| = 0.999 delta``.
    Unpacks as ``(delta, worst_ratio, ok)``.
    """
    x, u = cvector(x), cvector(u)
    if x.size != u.size:
        raise ParameterError("x and u differ in length")
    if not eps > 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    N = tail_index(x, u)
    M = 1.0 + float(norm(x, p)) + float(norm(u, p))
    delta = min(1.0, eps / (M**2 * (N**3 * M**N + 2.0**7 * (1 + N))))
    circle = 0.5 * delta * np.exp(2j * np.pi * np.arange(16) / 16)
    rays = 0.999 * delta * np.exp(2j * np.pi * (np.arange(8) + 0.5) / 8)
    worst = max(remainder_delta(x, u, t) for t in np.concatenate([circle, rays])) / eps
    return RemainderCheck(delta, worst, bool(worst < 1), N, M)
