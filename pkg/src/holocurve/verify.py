"""Invariant suites that produce pass/fail tables.

Each suite returns a list of :class:`Row` objects. A row compares an
observed number with a bound, either ``observed <= bound`` or
``observed >= bound`` (the relation is part of the case name). Rows whose
bound is infinite are informational convergence-table entries.

Suites draw all randomness from a :class:`numpy.random.Generator` seeded
per suite, so a fixed seed gives byte-identical tables.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import chifun
from .contour import ContourSpec, circle_integral, kth_differential
from .fieldexpr import Field, load_field
from .lincomplex import Box, Curve, Grid, Interval, norm, sup_norm
from .odesolve import (
    a_hat_continuity_probe,
    condition_P,
    lipschitz_bound,
    picard_solve,
    rk4_solve,
    solution_map_derivative,
)
from .randpoly import random_polymap
from .superpose import (
    partial2_apply,
    remainder_decay,
    remainder_norm,
    safety_radius,
    superpose,
)

__all__ = [
    "Row",
    "SUITES",
    "DEFAULT_SAMPLES",
    "bundled_fields",
    "run_suites",
    "format_csv",
    "suite_contour",
    "suite_superpose",
    "suite_ode",
    "suite_chi",
]

DEFAULT_SAMPLES = {
    "contour_polys": 50,
    "superpose_cases": 20,
    "ode_sensitivity": 10,
    "chi_contour": 100,
    "chi_continuity": 500,
    "chi_remainder": 200,
}


@dataclass(frozen=True)
class Row:
    case: str
    parameter: str
    observed: float
    bound: float
    relation: str = "<="

    @property
    def passed(self) -> bool:
        if math.isnan(self.observed):
            return False
        if self.relation == ">=":
            return self.observed >= self.bound
        return self.observed <= self.bound


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.9e}"


def format_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case", "parameter", "observed", "bound", "pass"])
    for r in rows:
        w.writerow([f"{r.case} {r.relation}", r.parameter, _fmt(r.observed), _fmt(r.bound), str(r.passed).lower()])
    return buf.getvalue()


def bundled_fields() -> dict[str, Field]:
    """The field files shipped in ``holocurve/fields`` keyed by stem."""
    out = {}
    for entry in sorted(resources.files("holocurve").joinpath("fields").iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".field"):
            out[entry.name[: -len(".field")]] = load_field(entry)
    return out


def _rel(a, b) -> float:
    return float(norm(np.asarray(a) - np.asarray(b))) / max(float(norm(np.asarray(b))), 1.0)


def _rand_c(rng, shape, scale=1.0):
    return scale * (rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape))


# --------------------------------------------------------------------------


def suite_contour(rng: np.random.Generator, samples=DEFAULT_SAMPLES) -> list[Row]:
    rows = []
    spec32 = ContourSpec(32, 1.0)
    for k in range(-8, 9):
        got = circle_integral(lambda z, k=k: z**k, spec32)
        rows.append(Row("contour/zeta_power", f"k={k}", abs(got - (k == -1)), 1e-14))

    spec = ContourSpec(64, 0.5)
    for c in range(samples["contour_polys"]):
        n = int(rng.integers(1, 4))
        k = int(rng.integers(0, 3))
        P = random_polymap(rng, n, 5, n_terms=5)
        x = _rand_c(rng, n, 0.7)
        dirs = [_rand_c(rng, n) for _ in range(k)]
        got = kth_differential(lambda z: P(0.0, z), x, dirs, spec)
        rows.append(Row("contour/kth_vs_symbolic", f"case={c},n={n},k={k}", _rel(got, P.differential(0.0, x, dirs)), 1e-10))

    for c in range(10):
        n = int(rng.integers(1, 4))
        P = random_polymap(rng, n, 4)
        f = lambda z: P(0.0, z)  # noqa: E731
        x, u, w = _rand_c(rng, n, 0.5), _rand_c(rng, n), _rand_c(rng, n)
        d_u = kth_differential(f, x, [u], spec)
        rows.append(Row("contour/cauchy_riemann", f"case={c}", _rel(kth_differential(f, x, [1j * u], spec), 1j * d_u), 1e-12))
        half = kth_differential(f, x, [u], spec.with_radius(0.25))
        rows.append(Row("contour/radius_invariance", f"case={c}", _rel(half, d_u), 1e-10))
        rows.append(
            Row(
                "contour/symmetry",
                f"case={c}",
                _rel(kth_differential(f, x, [u, w], spec), kth_differential(f, x, [w, u], spec)),
                1e-10,
            )
        )

    # convergence in the node count for a degree-12 polynomial
    coeffs = np.array([3.0**j / math.factorial(j) for j in range(13)])
    poly = lambda z: np.polynomial.polynomial.polyval(z, coeffs)  # noqa: E731
    dpoly = np.polynomial.polynomial.polyder(coeffs)
    exact = np.polynomial.polynomial.polyval(0.3, dpoly)
    for m in (8, 10, 12, 14, 16, 24, 32, 64):
        got = kth_differential(poly, np.array([0.3]), [np.array([1.0])], ContourSpec(m, 1.0))[0]
        bound = 1e-12 if m > 12 + 2 else math.inf
        rows.append(Row("contour/convergence_deg12", f"m_nodes={m}", abs(got - exact) / abs(exact), bound))
    return rows


def _superpose_case(rng):
    n = int(rng.integers(1, 4))
    box = None
    grid = Grid(Interval(0.0, 0.5), 41)
    tt = grid.nodes[:, None]
    cy = [_rand_c(rng, n, 0.3) for _ in range(3)]
    cv = [_rand_c(rng, n, 0.5) for _ in range(2)]
    y = Curve(grid, cy[0] + cy[1] * tt + cy[2] * tt**2)
    v = Curve(grid, cv[0] + cv[1] * tt)
    box = Box(Interval(0.0, 0.5), np.zeros(n), sup_norm(y) + 1.0)
    X = random_polymap(rng, n, 3, t_degree=1, n_terms=4, scale=0.5, min_degree=2)
    U = random_polymap(rng, n, 2, t_degree=1, n_terms=3, scale=0.5)
    return X, U, X.field(box), U.field(box), y, v


def suite_superpose(rng: np.random.Generator, samples=DEFAULT_SAMPLES) -> list[Row]:
    rows = []
    spec = ContourSpec(32, 0.5)
    for c in range(samples["superpose_cases"]):
        X, U, x, u, y, v = _superpose_case(rng)
        t0 = 0.5 * safety_radius(y, x.domain) / max(sup_norm(v), 1e-12)
        study = remainder_decay(x, u, y, v, t0, spec)
        rows.append(Row("superpose/remainder_order", f"case={c},n={y.dim}", study.order, 0.9, ">="))

        av = partial2_apply(x, y, v, spec).values
        per_node = np.stack(
            [
                kth_differential(lambda z, t=t: x(t, z), y.values[j], [v.values[j]], ContourSpec(32, 0.05))
                for j, t in enumerate(y.grid.nodes)
            ]
        )
        rows.append(Row("superpose/partial_vs_kth", f"case={c}", float(np.max(np.abs(av - per_node))), 1e-11))
        exact = X.differential(y.grid.nodes, y.values, [v.values])
        rows.append(Row("superpose/partial_vs_symbolic", f"case={c}", float(np.max(np.abs(av - exact))), 1e-11))

        alpha, beta = _rand_c(rng, 2)
        lhs = superpose(alpha * x + beta * u, y).values
        rhs = alpha * superpose(x, y).values + beta * superpose(u, y).values
        rows.append(Row("superpose/linearity_in_x", f"case={c}", float(np.max(np.abs(lhs - rhs))), 1e-13))

        w = Curve(y.grid, _rand_c(rng, y.values.shape, 0.3))
        add = partial2_apply(x, y, v + w, spec).values - av - partial2_apply(x, y, w, spec).values
        rows.append(Row("superpose/partial_additive", f"case={c}", float(np.max(np.abs(add))), 1e-10))
        hom = partial2_apply(x, y, alpha * v, spec).values - alpha * av
        rows.append(Row("superpose/partial_homogeneous", f"case={c}", float(np.max(np.abs(hom))), 1e-10))
        half = partial2_apply(x, y, v, spec.with_radius(0.25)).values
        rows.append(Row("superpose/delta0_scale_invariance", f"case={c}", float(np.max(np.abs(half - av))), 1e-10))

        if c == 0:
            for s, r in zip(study.moduli, study.remainders[0]):
                rows.append(Row("superpose/remainder_over_t", f"case=0,|t|={s:.6e}", r / s, math.inf))
            halving = study.remainders[0][:-1] / study.remainders[0][1:]
            for j, q in enumerate(halving):
                rows.append(Row("superpose/remainder_halving_dev", f"case=0,j={j}", abs(q - 2.0) / 2.0, 0.1))
    return rows


def _ode_closed_forms(fields):
    rows = []
    lin = fields["linear"]
    rep = picard_solve(lin, [1.0], tol=1e-12)
    t = rep.solution.grid.nodes
    err = float(np.max(np.abs(rep.solution.values[:, 0] - np.exp(0.5 * t))))
    rows.append(Row("ode/picard_vs_closed_linear", "lambda=0.5,A=0.5", err, 1e-10))
    ric = fields["riccati"]
    rep = picard_solve(ric, [0.5], tol=1e-12)
    err = float(np.max(np.abs(rep.solution.values[:, 0] - 0.5 / (1 - 0.5 * t))))
    rows.append(Row("ode/picard_vs_closed_riccati", "xi=0.5,A=0.5", err, 1e-8))
    return rows


def _constant_field(frac: float):
    box = Box(Interval(0.0, 0.5), [0.0], 1.0)
    B1_max = 0.9 * 1.0
    c = frac * B1_max / box.interval.A
    return Field.from_source(repr(c), box), B1_max


def _sensitivity_case(rng, c):
    n = int(rng.integers(1, 3))
    P = random_polymap(rng, n, 3, t_degree=1, n_terms=4, scale=0.4)
    Q = random_polymap(rng, n, 2, t_degree=1, n_terms=3, scale=0.3)
    box = Box(Interval(0.0, 0.5), np.zeros(n), 2.0)
    phi, dphi = P.field(box), Q.field(box)
    xi = _rand_c(rng, n, 0.2)
    dxi = _rand_c(rng, n, 0.5)
    return phi, dphi, xi, dxi


def sensitivity_errors(phi, dphi, xi, dxi, tau=1e-4, spec=ContourSpec()):
    """``(fd_error, cr_error)`` for the solution-map derivative in direction ``(dxi, dphi)``."""
    y = picard_solve(phi, xi, tol=1e-14).solution
    v = solution_map_derivative(phi, xi, y, dxi, dphi, spec)
    plus = picard_solve(phi + tau * dphi, xi + tau * dxi, tol=1e-14).solution
    minus = picard_solve(phi - tau * dphi, xi - tau * dxi, tol=1e-14).solution
    fd = (plus.values - minus.values) / (2 * tau)
    fd_err = sup_norm(Curve(y.grid, v.values - fd), phi.domain.norm_p)
    vi = solution_map_derivative(phi, xi, y, 1j * dxi, 1j * dphi, spec)
    cr_err = sup_norm(Curve(y.grid, vi.values - 1j * v.values), phi.domain.norm_p)
    return fd_err, cr_err


def suite_ode(rng: np.random.Generator, samples=DEFAULT_SAMPLES) -> list[Row]:
    fields = bundled_fields()
    rows = _ode_closed_forms(fields)
    tol = 1e-12
    for name, phi in fields.items():
        xi = phi.domain.center
        rep = picard_solve(phi, xi, tol=tol)
        rk = rk4_solve(phi, xi, 200)
        diff = sup_norm(Curve(rk.grid, rep.solution.values - rk.values))
        rows.append(Row("ode/picard_vs_rk4", f"field={name}", diff, max(1e-8, 10 * tol)))
        rows.append(Row("ode/fixed_point_residual", f"field={name}", rep.residual, 10 * tol))
        ic = float(np.max(np.abs(rep.solution.values[rep.solution.grid.center_index] - xi)))
        rows.append(Row("ode/initial_condition", f"field={name}", ic, 0.0))
        if rep.condition_ok:
            rows.append(Row("ode/observed_ratio", f"field={name}", rep.observed_ratio, rep.contraction + 0.05))

    for frac in (0.1, 0.3, 0.4, 0.45, 0.49, 0.51, 0.55, 0.6, 0.9):
        phi, B1_max = _constant_field(frac)
        ok, B1 = condition_P(phi, [0.0])
        expected = frac < 0.5
        rows.append(Row("ode/condition_constant_field", f"A|c|/B1max={frac}", float(ok != expected), 0.0))
        if ok:
            rep = picard_solve(phi, [0.0])
            rows.append(Row("ode/observed_ratio_constant", f"A|c|/B1max={frac}", rep.observed_ratio, rep.contraction + 0.05))

    for c in range(samples["ode_sensitivity"]):
        phi, dphi, xi, dxi = _sensitivity_case(rng, c)
        fd_err, cr_err = sensitivity_errors(phi, dphi, xi, dxi)
        rows.append(Row("ode/derivative_vs_difference", f"case={c},n={phi.dim}", fd_err, 1e-6))
        rows.append(Row("ode/derivative_cauchy_riemann", f"case={c},n={phi.dim}", cr_err, 1e-9))

    lin = fields["linear"]
    rows.append(Row("ode/lipschitz_linear_reldev", "lambda=0.5", abs(lipschitz_bound(lin, (0.0, [1.0]), 0.1) - 0.5) / 0.5, 0.05))
    sq = Field.from_source("z0^2", Box(Interval(0.0, 0.5), [1.0], 1.0))
    rows.append(Row("ode/lipschitz_square_reldev", "xi=1,delta0=0.01", abs(lipschitz_bound(sq, (0.0, [1.0]), 0.01) - 2.0) / 2.0, 0.1))

    tz = Field.from_source("t*z0", Box(Interval(0.0, 0.5), [1.0], 2.0))
    previous = None
    for m in (51, 101, 201):
        y = picard_solve(tz, [1.0], m_grid=m).solution
        probe = a_hat_continuity_probe(tz, y)
        rows.append(Row("ode/a_hat_probe_over_h", f"m_grid={m}", probe / y.grid.h, 2.0))
        if previous is not None:
            rows.append(Row("ode/a_hat_refinement_dev", f"m_grid={m}", abs(probe / previous - 0.5) / 0.5, 0.25))
        previous = probe
    return rows


def _chi_sample(rng, n, p, max_norm=2.0):
    scales = rng.choice([0.02, 0.1, 0.3, 0.8], size=n)
    x = _rand_c(rng, n) * scales
    x *= rng.uniform(0, max_norm) / max(float(norm(x, p)), 1e-300)
    return x


def suite_chi(rng: np.random.Generator, samples=DEFAULT_SAMPLES) -> list[Row]:
    rows = []
    spec = ContourSpec(64, 0.5)
    worst = 0.0
    for _ in range(samples["chi_contour"]):
        n = 16
        x = _chi_sample(rng, n, 2.0, 1.0)
        u = _rand_c(rng, n)
        got = kth_differential(chifun.chi_map, x, [u], spec)[0]
        ref = chifun.dchi(x, u)
        worst = max(worst, abs(got - ref) / max(abs(ref), 1e-300))
    rows.append(Row("chi/dchi_vs_contour_max_rel", f"samples={samples['chi_contour']},n=16", worst, 1e-10))

    worst, fails = 0.0, 0
    for s in range(samples["chi_continuity"]):
        p = (1.0, 2.0)[s % 2]
        x = _chi_sample(rng, 32, p)
        u = _rand_c(rng, 32)
        u *= 0.999 * rng.uniform(0, 1 / 8) / float(norm(u, p))
        chk = chifun.continuity_bound_check(x, u, p)
        fails += not chk.ok
        if chk.rhs > 0:
            worst = max(worst, chk.lhs / chk.rhs)
    rows.append(Row("chi/continuity_max_lhs_over_rhs", f"samples={samples['chi_continuity']},n=32", worst, 1.0))
    rows.append(Row("chi/continuity_failures", f"samples={samples['chi_continuity']}", float(fails), 0.0))

    worst, fails = 0.0, 0
    for s in range(samples["chi_remainder"]):
        p = (1.0, 2.0)[s % 2]
        x = _chi_sample(rng, 16, p)
        u = _chi_sample(rng, 16, p, 1.0)
        eps = 10.0 ** rng.uniform(-6, 0)
        chk = chifun.remainder_bound_check(x, u, eps, p)
        fails += not chk.ok
        worst = max(worst, chk.worst_ratio)
    rows.append(Row("chi/remainder_max_ratio", f"samples={samples['chi_remainder']},n=16", worst, 1.0))
    rows.append(Row("chi/remainder_failures", f"samples={samples['chi_remainder']}", float(fails), 0.0))

    x, value = chifun.unboundedness_witness(30, 100)
    rows.append(Row("chi/witness_value", "target=30,n=100", abs(value), 30.0, ">="))
    rows.append(Row("chi/witness_norm", "target=30,n=100,p=1", float(norm(x, 1.0)), 1.0))

    x = _chi_sample(rng, 16, 2.0)
    padded = np.concatenate([x, np.zeros(8)])
    rows.append(Row("chi/truncation_monotone", "n=16,n+8", abs(chifun.chi(padded) - chifun.chi(x)), 0.0))
    return rows


SUITES = {
    "contour": suite_contour,
    "superpose": suite_superpose,
    "ode": suite_ode,
    "chi": suite_chi,
}


def run_suites(names, seed: int, samples=None, workers: int = 1) -> list[Row]:
    """Run the named suites (``"all"`` expands to every suite) in a fixed order.

    Suite ``k`` of the full list draws from ``SeedSequence(seed).spawn``
    child ``k``, so results do not depend on which suites run together or
    on ``workers``.
    """
    if isinstance(names, str):
        names = [names]
    order = list(SUITES)
    picked = order if "all" in names else [n for n in order if n in names]
    unknown = set(names) - set(order) - {"all"}
    if unknown:
        raise KeyError(f"unknown suite(s): {sorted(unknown)}")
    merged = dict(DEFAULT_SAMPLES)
    merged.update(samples or {})
    children = np.random.SeedSequence(seed).spawn(len(order))

    def run(name):
        rng = np.random.default_rng(children[order.index(name)])
        return SUITES[name](rng, merged)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(run, picked))
    return [row for rows in results for row in rows]
