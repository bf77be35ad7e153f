"""Acceptance suite: twelve criteria at their stated tolerances.

Each test records one PASS/FAIL line; the lines are printed together at the
end of the pytest run and also immediately when the test body finishes.
"""

import json
import time

import numpy as np

from bpk import analyticity as an
from bpk import bernstein as bc
from bpk import cli
from bpk import operators as op
from bpk import subordinator as sb
from bpk.errors import PreconditionError

import oracles

RESULTS: dict[int, str] = {}

STABLE = bc.make_stable(0.5)
GAMMA = bc.make_gamma()
CDFS = {"stable": (STABLE, oracles.stable_half_cdf), "gamma": (GAMMA, oracles.gamma_cdf)}


def _record(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def _lift(psi, A):
    if A.n == 1:
        return psi
    return bc.make_stable(0.5, (1.0, 1.0)) if psi.label.startswith("stable") else bc.make_gamma((1.0, 1.0))


def test_c01_subordinator_oracle():
    worst, runtime = 0.0, {}
    for name, (psi, cdf) in CDFS.items():
        t0 = time.perf_counter()
        for t in (0.5, 1.0, 2.0):
            m = sb.compute_nu(psi, t)
            assert m.N == 2 ** 14
            worst = max(worst, oracles.l1_to_cdf(m.weights, m.atom0, m.defect, m.h, lambda u: cdf(u, t)))
        runtime[name] = time.perf_counter() - t0
    ok = worst <= 1e-3 and runtime["stable"] < 5.0
    _record(1, ok, f"max L1 {worst:.2e} (<= 1e-3), stable runtime {runtime['stable']:.2f}s (< 5s)")


def test_c02_semigroup_law():
    tvs = {}
    for name, (psi, _) in CDFS.items():
        one = sb.compute_nu(psi, 1.0)
        half = sb.compute_nu(psi, 0.5, sb.GridSpec(U=one.U))
        tvs[name] = sb.tv_distance(sb.convolve(half, half), one)
    ok = max(tvs.values()) <= 5e-3
    _record(2, ok, "TV " + ", ".join(f"{k} {v:.2e}" for k, v in tvs.items()) + " (<= 5e-3)")


def test_c03_bt_identity():
    battery = [sb.ExponentialPolynomial(c, s) for c, s in oracles.poly_battery()]
    assert len(battery) == 10
    worst = 0.0
    for psi, _ in CDFS.values():
        for t in (0.5, 1.0):
            nu = sb.compute_nu(psi, t)
            for p in battery:
                ref = sb.bt_closed_form(psi, t, p)
                got = sb.bt_double_integral(psi, nu, p)
                worst = max(worst, abs(got - ref) / (1 + abs(ref)))
    _record(3, worst <= 1e-3, f"max relative gap {worst:.2e} (<= 1e-3)")


def test_c04_shift_integral_round_trip():
    lap, opr = 0.0, 0.0
    for psi, t in ((STABLE, 1.0), (GAMMA, 0.5)):
        rep = an.lemma1_b(sb.compute_nu(psi, t, sb.GridSpec(U=2.0)), psi)
        assert len(rep.laplace_errors) == 10
        lap = max(lap, max(rep.laplace_errors))
        opr = max(opr, rep.operator_error)
    ok = lap <= 1e-4 and opr <= 1e-6
    _record(4, ok, f"Laplace probe {lap:.2e} (<= 1e-4), operator probe {opr:.2e} M (<= 1e-6 M)")


def test_c05_monotone_shortcut():
    f = sb.compute_nu(GAMMA, 0.5)
    k = an.k_f_mu(f, GAMMA.measure)
    gap = abs(an.corollary1_k(f, GAMMA.measure) - k)
    try:
        an.corollary1_k(sb.compute_nu(STABLE, 1.0), STABLE.measure)
        rejected = False
    except PreconditionError:
        rejected = True
    ok = gap <= 1e-4 * (1 + k) and rejected
    _record(5, ok, f"gamma gap {gap:.2e} (<= {1e-4 * (1 + k):.2e}), stable rejected {rejected}")


def test_c06_necessary_conditions():
    parts, ok = [], True
    for alpha in (0.3, 0.5, 0.7):
        psi = bc.make_stable(alpha)
        t0 = time.perf_counter()
        fit = an.growth_fit(psi, np.geomspace(1.0, 1e3, 13))
        sec = an.sector_test(psi)
        dt = time.perf_counter() - t0
        dg, da = abs(fit.gamma - alpha), abs(sec.boundary_half_angle - alpha * np.pi / 2)
        ok &= dg <= 0.02 and da <= 0.01 and dt < 10.0
        parts.append(f"a={alpha}: |dgamma| {dg:.1e}, |dangle| {da:.1e}, {dt:.1f}s")
    _record(6, ok, "; ".join(parts))


def test_c07_jt_scan_and_verdicts():
    times = np.geomspace(1e-3, 1, 20)
    scan = an.jt_scan(STABLE, times)
    tv = np.array([r[2] for r in scan.rows])
    small = tv[times < 1e-2].max()
    ratio = small / np.median(tv)
    fin = bc.make_tempered(-0.5, 1.0)
    fscan = an.jt_scan(fin, times)
    ftv = np.array([r[2] for r in fscan.rows])
    cfg = {"t_scan": {"min": 1e-3, "max": 1, "points": 20}}
    verdicts = (an.full_report(STABLE, cfg).verdict, an.full_report(fin, cfg).verdict)
    ok = scan.bounded and ratio <= 2.0 and ftv[0] < 1e-2 * ftv[-1] and verdicts == ("member", "member")
    _record(7, ok, f"stable max/median {ratio:.3f} (<= 2), finite t J_t {ftv[0]:.1e} -> 0, verdicts {verdicts}")


def test_c08_operator_oracle_equivalence():
    tuples = [op.make_diagonal([-1.0, -4.0, -0.3 + 2j]), op.make_jordan(),
              op.make_circulant(64), op.make_circulant(256), op.make_circulant(1024),
              op.make_commuting_pair()]
    worst, where = 0.0, ""
    for psi in (STABLE, GAMMA):
        for A in tuples:
            for t in (0.25, 1.0):
                q = _lift(psi, A)
                r = op.opnorm(op.subordinate(q, A, t) - op.exp_psiA(q, A, t)) / A.M
                if r > worst:
                    worst, where = r, f"{A.label}, {psi.label}, t={t}"
    _record(8, worst <= 1e-4, f"max gap {worst:.2e} M (<= 1e-4 M) at {where}")


def test_c09_generator_probe():
    rep = op.generator_probe(STABLE, op.make_diagonal([-1.0, -4.0]), [1e-1, 1e-2, 1e-3, 1e-4])
    _record(9, rep.rate >= 0.8, f"log-log rate {rep.rate:.3f} (>= 0.8)")


def test_c10_norm_sum():
    sa = op.norm_sum_check(op.make_selfadjoint_pair())
    times = np.geomspace(1e-2, 1, 21)
    sums = [op.norm_sum_check(op.make_circulant(d, "centered"), times) for d in (64, 256, 1024)]
    vals = [r.weighted_sum for r in sums]
    ok = sa.passed and sa.weighted_sum < 2.0 and not sums[-1].passed and vals[-1] >= 1.9
    _record(10, ok, f"self-adjoint {sa.weighted_sum:.3f} pass; circulant d=64,256,1024: "
                    + ", ".join(f"{v:.3f}" for v in vals) + " (limsup proxy >= 1.9)")


def test_c11_example1():
    psi = bc.make_example1(bc.make_atoms([[1.0]], [1.0]))
    s = -np.random.default_rng(11).uniform(0.01, 6, size=(20, 2))
    direct = oracles.example1_direct(s[:, 0], s[:, 1], lambda x: np.exp(x) - 1, np.exp, 1.0)
    gap = np.abs(bc.eval_real(psi, s, method="quadrature") - direct).max()
    _record(11, gap <= 1e-6, f"max gap {gap:.2e} (<= 1e-6) at 20 points")


def test_c12_cli_determinism(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"schema": 1, "psi": {"family": "stable", "alpha": 0.5}, "seed": 17,
                               "t_scan": {"min": 1e-3, "max": 1, "points": 8},
                               "check": {"k_lower": {"budget": 8}}}))
    outs, codes = [], []
    for n in (1, 4):
        out = tmp_path / f"out{n}"
        codes.append(cli.run(["check", "--config", str(cfg), "--threads", str(n), "--out", str(out)]))
        outs.append({p.relative_to(out).as_posix(): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()})
    ok = codes == [0, 0] and outs[0] == outs[1] and len(outs[0]) > 0
    _record(12, ok, f"exit codes {codes}, {len(outs[0])} files byte-identical {outs[0] == outs[1]}")
