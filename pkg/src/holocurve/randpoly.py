"""Random polynomial fields with exact symbolic derivatives.

Used as an oracle for the contour machinery: a :class:`Poly` knows its
own partial derivatives by exponent bookkeeping and never touches a
contour integral.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .fieldexpr import Field
from .lincomplex import Box

__all__ = ["Poly", "PolyMap", "random_polymap"]


@dataclass(frozen=True)
class Poly:
    """``sum c * t^a * z0^b0 * ... * z{n-1}^b{n-1}``; exponents stored as ``(a, b0, ...)``."""

    n: int
    terms: tuple  # ((exponents, coefficient), ...)

    def __call__(self, t, z):
        z = np.asarray(z, dtype=complex)
        t = np.asarray(t, dtype=float)
        shape = np.broadcast_shapes(t.shape, z.shape[:-1])
        out = np.zeros(shape, dtype=complex)
        for exps, c in self.terms:
            term = c * t ** exps[0]
            for j, e in enumerate(exps[1:]):
                if e:
                    term = term * z[..., j] ** e
            out = out + term
        return out

    def dz(self, j: int) -> "Poly":
        terms = []
        for exps, c in self.terms:
            e = exps[1 + j]
            if e:
                new = list(exps)
                new[1 + j] -= 1
                terms.append((tuple(new), c * e))
        return Poly(self.n, tuple(terms))

    def source(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.terms:
            factors = [f"({c.real!r}{'+' if c.imag >= 0 else '-'}{abs(c.imag)!r}i)"]
            if exps[0]:
                factors.append(f"t^{exps[0]}")
            for j, e in enumerate(exps[1:]):
                if e:
                    factors.append(f"z{j}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    @property
    def degree(self) -> int:
        return max((sum(e[1:]) for e, _ in self.terms), default=0)


@dataclass(frozen=True)
class PolyMap:
    """A polynomial map ``C^n -> C^n`` (one :class:`Poly` per coordinate)."""

    coords: tuple

    @property
    def n(self) -> int:
        return len(self.coords)

    def __call__(self, t, z):
        return np.stack([p(t, z) for p in self.coords], axis=-1)

    def source(self) -> str:
        return ", ".join(p.source() for p in self.coords)

    def field(self, domain: Box) -> Field:
        return Field.from_source(self.source(), domain)

    def differential(self, t, z, dirs) -> np.ndarray:
        """Exact ``d^k`` in the state at ``(t, z)`` applied to ``dirs``."""
        z = np.asarray(z, dtype=complex)
        k = len(dirs)
        if k == 0:
            return self(t, z)
        out = np.zeros(z.shape[:-1] + (self.n,), dtype=complex)
        for idx in itertools.product(range(self.n), repeat=k):
            weight = 1.0 + 0j
            for d, j in zip(dirs, idx):
                weight = weight * np.asarray(d, dtype=complex)[..., j]
            vals = []
            for p in self.coords:
                for j in idx:
                    p = p.dz(j)
                vals.append(p(t, z))
            out = out + np.asarray(weight)[..., None] * np.stack(vals, axis=-1)
        return out


def random_polymap(
    rng: np.random.Generator,
    n: int,
    degree: int,
    t_degree: int = 0,
    n_terms: int = 4,
    scale: float = 1.0,
    min_degree: int = 0,
) -> PolyMap:
    """Random complex-coefficient polynomial map of total state degree <= ``degree``.

    Each coordinate has ``n_terms`` random monomials and always includes one
    monomial of exact degree ``max(min_degree, 0)`` when ``min_degree > 0``.
    """
    coords = []
    for _ in range(n):
        terms = {}
        picks = []
        if min_degree > 0:
            e = np.zeros(n, dtype=int)
            for _ in range(min_degree):
                e[rng.integers(n)] += 1
            picks.append(e)
        while len(picks) < n_terms:
            total = int(rng.integers(0, degree + 1))
            e = np.zeros(n, dtype=int)
            for _ in range(total):
                e[rng.integers(n)] += 1
            picks.append(e)
        for e in picks:
            a = int(rng.integers(0, t_degree + 1))
            key = (a,) + tuple(int(v) for v in e)
            c = scale * complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            terms[key] = terms.get(key, 0) + c
        coords.append(Poly(n, tuple(sorted(terms.items()))))
    return PolyMap(tuple(coords))
