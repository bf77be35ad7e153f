import json
import subprocess
import sys

import numpy as np
import pytest

from bpk import cli

STABLE = {"family": "stable", "alpha": 0.5}


def _config(tmp_path, **kw):
    cfg = {"schema": 1, "psi": STABLE} | kw
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def _files(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_eval_rows(tmp_path, capsys):
    pts = tmp_path / "pts.csv"
    pts.write_text("-1\n-4\n0.5\n")
    out = tmp_path / "out"
    assert cli.run(["eval", "--config", _config(tmp_path), "--points", str(pts), "--out", str(out)]) == 0
    lines = (out / "eval.csv").read_text().splitlines()
    assert lines[0] == "z1,re,im,status"
    assert lines[1] == "-1,-1,0,ok"
    assert lines[2].startswith("-4,-2") and lines[2].endswith(",ok")
    assert lines[3] == "0.5,nan,nan,domain_error"
    assert json.loads(capsys.readouterr().out)["ok"] == 2


def test_eval_complex_points(tmp_path):
    pts = tmp_path / "pts.csv"
    pts.write_text("1j\n")
    out = tmp_path / "out"
    assert cli.run(["eval", "--config", _config(tmp_path), "--points", str(pts), "--out", str(out)]) == 0
    head, row = (out / "eval.csv").read_text().splitlines()
    assert head == "z1_re,z1_im,re,im,status"
    re, im = map(float, row.split(",")[2:4])
    assert abs(complex(re, im) - complex(-0.7071067811865476, 0.7071067811865476)) < 1e-6


def test_nu_summary(tmp_path):
    out = tmp_path / "out"
    cfg = _config(tmp_path, t_values=[0.5, 1.0], grid={"N": 4096})
    assert cli.run(["nu", "--config", cfg, "--out", str(out)]) == 0
    rows = (out / "nu_summary.csv").read_text().splitlines()
    assert rows[0].startswith("index,t,U,h,N") and len(rows) == 3
    mass = float(rows[1].split(",")[8])
    assert abs(mass - 1) < 1e-6
    d = json.loads((out / "nu_001.json").read_text())
    assert d["n"] == 1 and len(d["weights"]) == 4096


def test_apply_deltas(tmp_path):
    out = tmp_path / "out"
    cfg = _config(tmp_path, t_values=[0.25, 1.0],
                  tuples=[{"kind": "diagonal", "diagonals": [[-1, -4]], "name": "diag"}, {"kind": "jordan"}])
    assert cli.run(["apply", "--config", cfg, "--out", str(out)]) == 0
    rows = [r.split(",") for r in (out / "deltas.csv").read_text().splitlines()]
    assert rows[0] == ["tuple", "t", "delta", "M", "relative"] and len(rows) == 5
    assert all(float(r[4]) <= 1e-4 for r in rows[1:])
    from bpk import operators as op
    P = op.read_matrix(out / "diag_psiA.csv")
    assert np.allclose(P, np.diag([-1.0, -2.0]), atol=1e-8)


@pytest.mark.parametrize("psi,scan,code", [
    (STABLE, {"min": 1e-3, "max": 1, "points": 6}, 0),
    (STABLE, {"min": 0.5, "max": 0.5, "points": 1}, 1),
    ({"raw": "square"}, {"min": 1e-3, "max": 1, "points": 3}, 2),
])
def test_check_exit_codes(tmp_path, psi, scan, code):
    out = tmp_path / "out"
    cfg = _config(tmp_path, psi=psi, t_scan=scan)
    assert cli.run(["check", "--config", cfg, "--out", str(out)]) == code
    rep = json.loads((out / "report.json").read_text())
    assert rep["verdict"] == {0: "member", 1: "inconclusive", 2: "non-member"}[code]


def test_error_records_have_distinct_codes(tmp_path, capsys):
    out = tmp_path / "out"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    codes = {
        cli.run(["nu", "--config", str(bad), "--out", str(out)]),
        cli.run(["check", "--config", _config(tmp_path, psi={"family": "stable", "alpha": 1.5}), "--out", str(out)]),
        cli.run(["eval", "--config", _config(tmp_path, points=[0.5]), "--out", str(out)]),
        cli.run(["nu", "--config", _config(tmp_path, grid={"N": 1000}), "--out", str(out)]),
    }
    assert len(codes) == 3 and all(c > 2 for c in codes)   # 22, 11, 12
    rec = json.loads((out / "error.json").read_text())
    assert rec["error"] == "parameter_error" and rec["exit_code"] == 11
    assert "parameter_error" in capsys.readouterr().err


def test_unknown_tolerance_and_flags(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    out = tmp_path / "out"
    assert cli.run(["nu", "--config", _config(tmp_path), "--tol", "bogus=1", "--out", str(out)]) == 22
    assert cli.run(["frobnicate"]) == 22
    assert cli.run(["nu", "--config", _config(tmp_path), "--threads", "0", "--out", str(out)]) == 22


def test_check_is_byte_identical_across_threads(tmp_path):
    cfg = _config(tmp_path, t_scan={"min": 1e-3, "max": 1, "points": 6}, seed=5,
                  check={"k_lower": {"budget": 4}})
    outs = []
    for n in (1, 4):
        out = tmp_path / f"out{n}"
        assert cli.run(["check", "--config", cfg, "--threads", str(n), "--out", str(out)]) == 0
        outs.append(_files(out))
    assert outs[0] == outs[1] and "report.json" in outs[0] and "jt.csv" in outs[0]


def test_console_script_entry(tmp_path):
    out = tmp_path / "out"
    pts = tmp_path / "p.csv"
    pts.write_text("-1\n")
    r = subprocess.run([sys.executable, "-m", "bpk.cli", "eval", "--config", _config(tmp_path),
                        "--points", str(pts), "--out", str(out)], capture_output=True, text=True)
    assert r.returncode == 0 and (out / "eval.csv").exists()
