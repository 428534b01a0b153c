"""Batch front-end: ``holocurve {solve,sensitivity,verify,chi-witness}``.

Jobs are described by a JSON config file. Reports are JSON, tables CSV.
Exit codes: 0 ok, 2 config error, 3 domain or evaluation error,
4 non-convergence, 5 failed check. Errors go to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__, chifun
from .contour import ContourSpec
from .errors import (
    ConvergenceError,
    DomainError,
    EvaluationError,
    FieldSyntaxError,
    ParameterError,
)
from .fieldexpr import Field, _complex, load_field
from .lincomplex import Curve, cvector, norm, sup_norm
from .odesolve import condition_P, picard_solve, solution_map_derivative
from .verify import DEFAULT_SAMPLES, SUITES, format_csv, run_suites

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_CHECK = 0, 2, 3, 4, 5

FD_STEP = 1e-4
FD_THRESHOLD = 1e-6

_KNOWN_KEYS = {
    "phi", "dphi", "xi", "dxi", "grid", "contour", "tol", "max_iter",
    "n", "p", "t0", "A", "samples", "seed", "out", "fd_step", "fd_threshold",
}


class ConfigError(Exception):
    pass


# -- config -----------------------------------------------------------------


def _read_config(path: str | None) -> tuple[dict, Path]:
    if path is None:
        return {}, Path.cwd()
    p = Path(path)
    try:
        cfg = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(cfg) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    return cfg, p.resolve().parent


def _load_field_ref(ref, base: Path, domain_from: Field | None = None) -> Field:
    if not isinstance(ref, str):
        raise ConfigError(f"field reference must be a string, got {ref!r}")
    if ref.startswith("builtin:"):
        entry = resources.files("holocurve").joinpath("fields", ref[len("builtin:"):] + ".field")
        if not entry.is_file():
            raise ConfigError(f"no bundled field named {ref[len('builtin:'):]!r}")
        return load_field(entry)
    if ref.startswith("expr:"):
        if domain_from is None:
            raise ConfigError("'expr:' fields need the domain of phi")
        return Field.from_source(ref[len("expr:"):], domain_from.domain)
    path = Path(ref)
    if not path.is_absolute():
        path = base / path
    if not path.is_file():
        raise ConfigError(f"field file not found: {ref}")
    return load_field(path)


def _vector(value, n: int, name: str) -> np.ndarray:
    if value is None:
        return np.zeros(n, dtype=complex)
    if not isinstance(value, list):
        value = [value]
    try:
        vec = cvector([_complex(v) if isinstance(v, str) else v for v in value])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from None
    if vec.size != n:
        raise ConfigError(f"{name} has {vec.size} entries, field dimension is {n}")
    return vec


def _positive(cfg, key, default, kind=float):
    value = cfg.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
        raise ConfigError(f"{key} must be a positive number, got {value!r}")
    if kind is int and value != int(value):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return kind(value)


def _job(cfg: dict, base: Path) -> dict:
    if "phi" not in cfg:
        raise ConfigError("config lacks 'phi'")
    phi = _load_field_ref(cfg["phi"], base)
    box = phi.domain
    checks = {"n": box.dim, "p": box.norm_p, "t0": box.interval.t0, "A": box.interval.A}
    for key, actual in checks.items():
        if key in cfg and not math.isclose(float(cfg[key]), float(actual), rel_tol=1e-12, abs_tol=1e-15):
            raise ConfigError(f"config {key}={cfg[key]} disagrees with the field domain ({actual})")
    dphi = _load_field_ref(cfg["dphi"], base, phi) if cfg.get("dphi") is not None else None
    if dphi is not None and dphi.domain != box:
        raise ConfigError("dphi must share the domain of phi")
    contour = cfg.get("contour", {})
    if not isinstance(contour, dict):
        raise ConfigError("contour must be an object with m_nodes and radius")
    grid = _positive(cfg, "grid", 201, int)
    if grid < 3 or grid % 2 == 0:
        raise ConfigError(f"grid must be odd and at least 3, got {grid}")
    return {
        "phi": phi,
        "dphi": dphi,
        "xi": _vector(cfg.get("xi"), box.dim, "xi"),
        "dxi": _vector(cfg.get("dxi"), box.dim, "dxi"),
        "grid": grid,
        "spec": ContourSpec(
            _positive(contour, "m_nodes", 64, int), _positive(contour, "radius", 0.5)
        ),
        "tol": _positive(cfg, "tol", 1e-12),
        "max_iter": _positive(cfg, "max_iter", 100, int),
        "fd_step": _positive(cfg, "fd_step", FD_STEP),
        "fd_threshold": _positive(cfg, "fd_threshold", FD_THRESHOLD),
    }


# -- output -------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def _curve_json(c: Curve) -> dict:
    return {
        "t": c.grid.nodes.tolist(),
        "re": c.values.real.tolist(),
        "im": c.values.imag.tolist(),
    }


def _write_atomic(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _report(command: str, args, cfg: dict, seed, body: dict) -> str:
    doc = {"command": command, "version": __version__, "seed": seed, "config": cfg, **body}
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def _out_path(args, cfg):
    return args.out if args.out is not None else cfg.get("out")


def _seed(args, cfg) -> int:
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")
    return seed


# -- commands -------------------------------------------------------------------


def _condition_body(job) -> dict:
    ok, B1 = condition_P(job["phi"], job["xi"], job["grid"])
    return {"condition_ok": ok, "B1": B1}


def _solve(job):
    return picard_solve(job["phi"], job["xi"], job["tol"], job["max_iter"], job["grid"])


def _solve_body(rep) -> dict:
    return {
        "solved": True,
        "condition_ok": rep.condition_ok,
        "B1": rep.B1,
        "tube_sup": rep.tube_sup,
        "contraction": rep.contraction,
        "iterations": rep.iterations,
        "residual": rep.residual,
        "solution": _curve_json(rep.solution),
    }


def cmd_solve(args) -> int:
    cfg, base = _read_config(args.config)
    job = _job(cfg, base)
    seed = _seed(args, cfg)
    cond = _condition_body(job)
    if not cond["condition_ok"] and not args.force:
        _write_atomic(_out_path(args, cfg), _report("solve", args, cfg, seed, {"solved": False, **cond}))
        return EXIT_CHECK
    rep = _solve(job)
    _write_atomic(_out_path(args, cfg), _report("solve", args, cfg, seed, _solve_body(rep)))
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    cfg, base = _read_config(args.config)
    job = _job(cfg, base)
    seed = _seed(args, cfg)
    cond = _condition_body(job)
    if not cond["condition_ok"] and not args.force:
        _write_atomic(_out_path(args, cfg), _report("sensitivity", args, cfg, seed, {"solved": False, **cond}))
        return EXIT_CHECK
    phi, dphi, xi, dxi = job["phi"], job["dphi"], job["xi"], job["dxi"]
    rep = _solve(job)
    y = rep.solution
    v = solution_map_derivative(phi, xi, y, dxi, dphi, job["spec"])

    tau = job["fd_step"]
    shift = Field.zero(phi.domain) if dphi is None else dphi
    ftol = min(job["tol"], 1e-13)
    plus = picard_solve(phi + tau * shift, xi + tau * dxi, ftol, job["max_iter"], job["grid"]).solution
    minus = picard_solve(phi - tau * shift, xi - tau * dxi, ftol, job["max_iter"], job["grid"]).solution
    fd = (plus.values - minus.values) / (2 * tau)
    fd_error = sup_norm(Curve(y.grid, v.values - fd), phi.domain.norm_p)
    passed = bool(fd_error < job["fd_threshold"])
    body = {
        **_solve_body(rep),
        "derivative": _curve_json(v),
        "fd_step": tau,
        "fd_error": fd_error,
        "fd_threshold": job["fd_threshold"],
        "fd_pass": passed,
    }
    _write_atomic(_out_path(args, cfg), _report("sensitivity", args, cfg, seed, body))
    return EXIT_OK if passed else EXIT_CHECK


def _threads() -> int:
    raw = os.environ.get("HOLOCURVE_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"HOLOCURVE_THREADS must be an integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"HOLOCURVE_THREADS must be at least 1, got {value}")
    return value


def cmd_verify(args) -> int:
    cfg, _ = _read_config(args.config)
    suite = args.suite
    if suite != "all" and suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {['all', *SUITES]}")
    samples = cfg.get("samples", {})
    if not isinstance(samples, dict) or set(samples) - set(DEFAULT_SAMPLES):
        raise ConfigError(f"samples must be an object with keys from {sorted(DEFAULT_SAMPLES)}")
    for key, value in samples.items():
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ConfigError(f"samples.{key} must be a positive integer, got {value!r}")
    rows = run_suites(suite, _seed(args, cfg), samples, _threads())
    _write_atomic(_out_path(args, cfg), format_csv(rows))
    return EXIT_OK if all(r.passed for r in rows) else EXIT_CHECK


def cmd_chi_witness(args) -> int:
    cfg, _ = _read_config(args.config)
    n = _positive(cfg, "n", 100, int)
    target = args.target
    if not math.isfinite(target) or target < 0:
        raise ConfigError(f"target must be a finite non-negative number, got {target}")
    x, value = chifun.unboundedness_witness(target, n)
    index = int(np.flatnonzero(x)[0])
    body = {
        "target": target,
        "n": n,
        "index": index,
        "entry": float(x[index].real),
        "value": float(value.real),
        "norm": float(norm(x, 1.0)),
        "pass": bool(abs(value) > target and norm(x, 1.0) < 1),
    }
    _write_atomic(_out_path(args, cfg), _report("chi-witness", args, cfg, _seed(args, cfg), body))
    return EXIT_OK


# -- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON job config")
    common.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    common.add_argument("--out", help="output file (default: stdout)")

    parser = argparse.ArgumentParser(prog="holocurve", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"holocurve {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_ in (
        ("solve", cmd_solve, "solve the initial value problem by Picard iteration"),
        ("sensitivity", cmd_sensitivity, "derivative of the solution map with a difference cross-check"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--force", action="store_true", help="solve even if the contraction condition fails")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", parents=[common], help="run invariant suites and write a CSV table")
    p.add_argument("--suite", default="all", help=f"one of: all, {', '.join(SUITES)}")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("chi-witness", parents=[common], help="point of norm < 1 where chi exceeds a target")
    p.add_argument("--target", type=float, default=30.0)
    p.set_defaults(func=cmd_chi_witness)
    return parser


def _fail(code: int, exc: BaseException) -> int:
    err = {"error": type(exc).__name__, "message": str(exc), "exit": code}
    for attr in ("t", "distance", "node", "contraction", "iterations", "line", "column"):
        if getattr(exc, attr, None) is not None:
            err[attr] = _jsonable(getattr(exc, attr))
    sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, ParameterError, FieldSyntaxError) as exc:
        return _fail(EXIT_CONFIG, exc)
    except (DomainError, EvaluationError) as exc:
        return _fail(EXIT_DOMAIN, exc)
    except ConvergenceError as exc:
        return _fail(EXIT_CONVERGENCE, exc)
    except OSError as exc:
        return _fail(EXIT_CONFIG, exc)


if __name__ == "__main__":
    sys.exit(main())
