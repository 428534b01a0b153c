import json

import numpy as np
import pytest

from holocurve import __version__
from holocurve.cli import main


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_linear(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"phi": "builtin:linear", "xi": [1], "tol": 1e-12, "seed": 5})
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "solve", "--config", cfg, "--out", str(out))
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["version"] == __version__ and rep["seed"] == 5
    assert rep["config"]["phi"] == "builtin:linear"
    assert rep["residual"] < 1e-12 and rep["condition_ok"]
    t = np.array(rep["solution"]["t"])
    y = np.array(rep["solution"]["re"])[:, 0] + 1j * np.array(rep["solution"]["im"])[:, 0]
    assert np.max(np.abs(y - np.exp(0.5 * t))) < 1e-10
    assert not list(tmp_path.glob(".r.json.*"))


def test_solve_condition_failure_and_force(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"phi": "builtin:riccati", "xi": [0.5]})
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "solve", "--config", cfg, "--out", str(out))
    rep = json.loads(out.read_text())
    assert code == 5 and rep["condition_ok"] is False and rep["solved"] is False
    code, _, _ = run(capsys, "solve", "--config", cfg, "--out", str(out), "--force")
    rep = json.loads(out.read_text())
    assert code == 0 and rep["condition_ok"] is False and rep["solved"] is True
    assert rep["contraction"] == "inf" or isinstance(rep["contraction"], float)


def test_field_file_relative_to_config(tmp_path, capsys):
    (tmp_path / "f.field").write_text("-0.5*z0\ndomain { t0=0, A=0.5, center=[0], radius=3 }\n")
    cfg = write(tmp_path, "c.json", {"phi": "f.field", "xi": ["0.5+0.5i"], "n": 1, "A": 0.5})
    code, out, _ = run(capsys, "solve", "--config", cfg)
    assert code == 0 and json.loads(out)["solved"]


@pytest.mark.parametrize(
    "cfg",
    [
        {"phi": "missing.field"},
        {"phi": "builtin:nope"},
        {"xi": [1]},
        {"phi": "builtin:linear", "xi": [1, 2]},
        {"phi": "builtin:linear", "grid": 10},
        {"phi": "builtin:linear", "tol": -1},
        {"phi": "builtin:linear", "n": 2},
        {"phi": "builtin:linear", "bogus": 1},
        "{not json",
    ],
)
def test_config_errors_exit_2(tmp_path, capsys, cfg):
    path = write(tmp_path, "c.json", cfg)
    code, _, err = run(capsys, "solve", "--config", path)
    assert code == 2
    assert json.loads(err)["exit"] == 2


def test_missing_config_file(capsys):
    code, _, err = run(capsys, "solve", "--config", "/nonexistent/c.json")
    assert code == 2 and "not found" in json.loads(err)["message"]


def test_domain_error_exit_3(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"phi": "builtin:linear", "xi": [9.0]})
    code, _, err = run(capsys, "solve", "--config", cfg, "--force")
    assert code == 3 and json.loads(err)["error"] == "DomainError"


def test_convergence_error_exit_4(tmp_path, capsys):
    (tmp_path / "f.field").write_text("3*z0\ndomain { t0=0, A=2, center=[0], radius=1e6 }\n")
    cfg = write(tmp_path, "c.json", {"phi": "f.field", "xi": [1], "max_iter": 5})
    code, _, err = run(capsys, "solve", "--config", cfg, "--force")
    assert code == 4 and json.loads(err)["iterations"] == 5


def test_sensitivity_linear(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"phi": "builtin:linear", "xi": [1], "dxi": [1]})
    code, out, _ = run(capsys, "sensitivity", "--config", cfg)
    rep = json.loads(out)
    assert code == 0 and rep["fd_error"] < 1e-6 and rep["fd_pass"]
    t = np.array(rep["derivative"]["t"])
    v = np.array(rep["derivative"]["re"])[:, 0]
    assert np.max(np.abs(v - np.exp(0.5 * t))) < 1e-10


def test_sensitivity_zero_direction(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"phi": "builtin:linear", "xi": [1], "dxi": [0], "dphi": "expr:0"})
    code, out, _ = run(capsys, "sensitivity", "--config", cfg)
    rep = json.loads(out)
    assert code == 0
    assert not np.any(rep["derivative"]["re"]) and not np.any(rep["derivative"]["im"])


def test_sensitivity_threshold_exit_5(tmp_path, capsys):
    out = tmp_path / "s.json"
    cfg = write(
        tmp_path, "c.json", {"phi": "builtin:riccati", "xi": [0.5], "dxi": [1], "fd_step": 0.2, "fd_threshold": 1e-12}
    )
    code, _, _ = run(capsys, "sensitivity", "--config", cfg, "--force", "--out", str(out))
    rep = json.loads(out.read_text())
    assert code == 5 and not rep["fd_pass"] and rep["fd_error"] > 1e-12


def test_verify_contour_and_unknown(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code, _, _ = run(capsys, "verify", "--suite", "contour", "--seed", "1", "--out", str(out))
    lines = out.read_text().splitlines()
    assert code == 0 and lines[0] == "case,parameter,observed,bound,pass"
    zeta = [ln for ln in lines if ln.startswith("contour/zeta_power")]
    assert len(zeta) == 17 and all(ln.endswith(",1.000000000e-14,true") for ln in zeta)
    code, _, err = run(capsys, "verify", "--suite", "nope")
    assert code == 2 and json.loads(err)["exit"] == 2


def test_verify_chi_deterministic(tmp_path, capsys, monkeypatch):
    cfg = write(tmp_path, "c.json", {"samples": {"chi_continuity": 500}})
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "verify", "--suite", "chi", "--seed", "3", "--config", cfg, "--out", str(a))[0] == 0
    monkeypatch.setenv("HOLOCURVE_THREADS", "3")
    assert run(capsys, "verify", "--suite", "chi", "--seed", "3", "--config", cfg, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    monkeypatch.setenv("HOLOCURVE_THREADS", "zero")
    assert run(capsys, "verify", "--suite", "chi")[0] == 2


def test_chi_witness(capsys):
    code, out, _ = run(capsys, "chi-witness", "--target", "30")
    rep = json.loads(out)
    assert code == 0 and rep["index"] == 99 and rep["value"] > 30 and rep["norm"] < 1
    code, _, err = run(capsys, "chi-witness", "--target", "1e6")
    assert code == 2 and "2718283" in json.loads(err)["message"]


def test_bad_arguments(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys)[0] == 2
