"""Command-line front end: ``bpk eval | nu | apply | check``.

Every run reads a JSON config (``--config``) and writes its files into
``--out``.  Exit codes: 0 success or ``member``, 1 ``inconclusive``,
2 ``non-member``, larger values are errors (an ``error.json`` record is
written and echoed on stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import analyticity as an
from . import bernstein as bc
from . import operators as op
from . import subordinator as sb
from .errors import BPKError, ConfigError
from .parallel import set_threads
from .serialize import SCHEMA_VERSION, psi_from_dict

TOL_NAMES = {"leak_tol", "clip_tol", "tail_tol", "subordinate_tol", "atom_tol"}


def _fmt(v: float) -> str:
    return f"{v + 0.0:.17g}"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise ConfigError(f"unsupported config schema {cfg.get('schema')}")
    cfg["_base"] = str(Path(path).resolve().parent)
    return cfg


def _parse_tols(items) -> dict:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or name not in TOL_NAMES:
            raise ConfigError(f"bad --tol {item!r}; known names: {', '.join(sorted(TOL_NAMES))}")
        try:
            out[name] = float(value)
        except ValueError as exc:
            raise ConfigError(f"bad --tol value {value!r}") from exc
    return out


def _psi(cfg: dict):
    if "psi" not in cfg:
        raise ConfigError("config has no psi descriptor")
    return psi_from_dict(cfg["psi"])


def _grid(cfg: dict) -> sb.GridSpec:
    g = dict(cfg.get("grid") or {})
    tol = cfg.get("tol", {})
    U = g.get("U", "auto")
    N = g.get("N", g.get("points"))
    try:
        return sb.GridSpec(N=None if N is None else int(N), U=None if U == "auto" else float(U),
                           leak_tol=tol.get("leak_tol", g.get("leak_tol")),
                           clip_tol=tol.get("clip_tol", 1e-4), tail_tol=tol.get("tail_tol", 1e-7))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad grid spec: {exc}") from exc


def _times(cfg: dict, default=(1.0,)) -> list[float]:
    if "t_values" in cfg:
        return [float(t) for t in cfg["t_values"]]
    if "t_scan" in cfg:
        return op.t_grid(cfg["t_scan"]).tolist()
    return list(default)


# ---------------------------------------------------------------------------
# subcommands

def _parse_point(row: list[str]) -> np.ndarray:
    return np.array([complex(v.strip().replace(" ", "")) for v in row])


def cmd_eval(cfg: dict, points: str | None, out: Path) -> int:
    psi = _psi(cfg)
    if points is not None:
        rows = [r for r in csv.reader(io.StringIO(Path(points).read_text())) if r and not r[0].startswith("#")]
    else:
        rows = [[str(v) for v in np.atleast_1d(p)] for p in cfg.get("points", [])]
    try:
        pts = [_parse_point(r) for r in rows]
    except ValueError as exc:
        raise ConfigError(f"unreadable point: {exc}") from exc
    if any(p.size != psi.n for p in pts):
        raise ConfigError(f"every point needs {psi.n} coordinates")
    real = all(np.all(p.imag == 0) for p in pts)
    head = [f"z{j + 1}" for j in range(psi.n)] if real else \
        [f"z{j + 1}_{c}" for j in range(psi.n) for c in ("re", "im")]
    lines = [",".join(head + ["re", "im", "status"])]
    ok = 0
    for p in pts:
        coords = [_fmt(v.real) for v in p] if real else [_fmt(x) for v in p for x in (v.real, v.imag)]
        try:
            method = cfg.get("method", "quadrature")
            if np.all(p.imag == 0):
                v = complex(np.squeeze(bc.eval_real(psi, p.real[None, :], method=method)))
            else:
                v = complex(np.squeeze(bc.eval_complex(psi, p[None, :], method=method)))
            lines.append(",".join(coords + [_fmt(v.real), _fmt(v.imag), "ok"]))
            ok += 1
        except BPKError as exc:
            lines.append(",".join(coords + ["nan", "nan", exc.kind]))
    _write(out / "eval.csv", "\n".join(lines) + "\n")
    print(json.dumps({"rows": len(pts), "ok": ok, "file": str(out / "eval.csv")}))
    return 0 if ok or not pts else 12


def cmd_nu(cfg: dict, out: Path) -> int:
    psi = _psi(cfg)
    grid = _grid(cfg)
    lines = ["index,t,U,h,N,window_mass,atom0,defect,mass,leakage,clipped"]
    for i, t in enumerate(_times(cfg)):
        m = sb.compute_nu(psi, t, grid)
        _write(out / f"nu_{i:03d}.json", json.dumps(m.to_dict()))
        win = float(m.weights.sum())
        vals = [t, m.U, m.h, m.N, win, m.atom0, m.defect, win + m.atom0 + m.defect, m.leakage, m.clipped]
        lines.append(",".join([str(i)] + [_fmt(float(v)) for v in vals]))
    _write(out / "nu_summary.csv", "\n".join(lines) + "\n")
    print(json.dumps({"files": len(lines) - 1, "summary": str(out / "nu_summary.csv")}))
    return 0


def _tuples(cfg: dict) -> list[tuple[str, op.CommutingTuple]]:
    specs = cfg.get("tuples")
    if not specs:
        raise ConfigError("config lists no tuples")
    out = []
    for k, spec in enumerate(specs):
        if isinstance(spec, str):
            path = Path(spec)
            if not path.is_absolute():
                path = Path(cfg.get("_base", ".")) / path
            A, man = op.load_manifest(path)
            out.append((man.get("name", path.stem), A))
        else:
            out.append((spec.get("name", f"{spec.get('kind', 'tuple')}_{k}"), op.builtin_tuple(spec)))
    return out


def cmd_apply(cfg: dict, out: Path) -> int:
    psi = _psi(cfg)
    tol = cfg.get("tol", {}).get("subordinate_tol", 1e-7)
    lines = ["tuple,t,delta,M,relative"]
    for name, A in _tuples(cfg):
        op.write_matrix(out / f"{name}_psiA.csv", op.apply_psi(psi, A))
        for i, t in enumerate(_times(cfg)):
            G = op.subordinate(psi, A, t, tol=tol)
            E = op.exp_psiA(psi, A, t)
            op.write_matrix(out / f"{name}_g_{i:03d}.csv", G)
            d = op.opnorm(G - E)
            lines.append(",".join([name, _fmt(t), _fmt(d), _fmt(A.M), _fmt(d / A.M)]))
    _write(out / "deltas.csv", "\n".join(lines) + "\n")
    print(json.dumps({"rows": len(lines) - 1, "deltas": str(out / "deltas.csv")}))
    return 0


def cmd_check(cfg: dict, out: Path) -> int:
    psi = _psi(cfg)
    check = dict(cfg.get("check") or {})
    check.setdefault("t_scan", cfg.get("t_scan"))
    if cfg.get("grid"):
        check.setdefault("grid", cfg["grid"])
    check.setdefault("seed", cfg.get("seed", 0))
    tol = cfg.get("tol", {})
    grid = dict(check.get("grid") or {})
    grid.update({k: v for k, v in tol.items() if k in ("leak_tol", "clip_tol", "tail_tol")})
    if grid:
        check["grid"] = grid
    if "atom_tol" in tol:
        check["atom_tol"] = tol["atom_tol"]
    if "tuples" in cfg and "tuples" not in check:
        check["tuples"] = [s for s in cfg["tuples"] if isinstance(s, dict)]
    report = an.full_report(psi, check)
    _write(out / "report.json", report.to_json() + "\n")
    for name, text in sorted(report.tables.items()):
        _write(out / f"{name}.csv", text)
    print(json.dumps({"verdict": report.verdict, "report": str(out / "report.json")}))
    return report.exit_code


# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON run config")
    common.add_argument("--out", default="bpk_out", help="output directory")
    common.add_argument("--threads", type=int, help="worker threads (default: BPK_THREADS or 1)")
    common.add_argument("--seed", type=int, help="seed for the randomized K search")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE", help="tolerance override")
    p = _Parser(prog="bpk", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    e = sub.add_parser("eval", parents=[common], help="evaluate psi at points")
    e.add_argument("--points", help="CSV with one point per row")
    sub.add_parser("nu", parents=[common], help="compute nu_t on a grid")
    sub.add_parser("apply", parents=[common], help="functional calculus on matrix tuples")
    sub.add_parser("check", parents=[common], help="membership report")
    return p


def run(argv=None) -> int:
    out = Path("bpk_out")
    try:
        args = build_parser().parse_args(argv)
        out = Path(args.out)
        cfg = load_config(args.config)
        cfg.setdefault("tol", {}).update(_parse_tols(args.tol))
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError("--threads must be positive")
            set_threads(args.threads)
        if args.command == "eval":
            return cmd_eval(cfg, args.points, out)
        if args.command == "nu":
            return cmd_nu(cfg, out)
        if args.command == "apply":
            return cmd_apply(cfg, out)
        return cmd_check(cfg, out)
    except BPKError as exc:
        rec = exc.to_record() | {"exit_code": exc.exit_code}
        text = json.dumps(rec, sort_keys=True)
        try:
            _write(out / "error.json", text + "\n")
        except OSError:
            pass
        print(text, file=sys.stderr)
        return exc.exit_code
    finally:
        set_threads(None)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
