import json

import numpy as np
import pytest

from bpk import analyticity as an
from bpk import bernstein as bc
from bpk import subordinator as sb
from bpk.errors import DensityError, PreconditionError

# independent value of k(f_1, mu) for the 1/2-stable law: for a unimodal f,
# ||f(. - u) - f||_1 = 2 (F(c) - F(c - u)) with f(c - u) = f(c), integrated
# against mu by adaptive quadrature on the closed-form density
STABLE_K_T1 = 1.7038799838329866

SCAN_T = np.geomspace(1e-3, 1, 20)


def _indicator():
    N = 1024
    h = 2.0 / N
    w = np.zeros(N)
    w[:N // 2] = h
    return sb.GridMeasure(1, 2.0, h, w)


def test_hand_case_indicator_and_atom():
    # f = 1_[0,1], mu = delta_{1/2}: ||f(. - 1/2) - f||_1 = 1
    f = _indicator()
    mu = bc.make_atoms([[0.5]], [1.0]).measure
    assert an.k_f_mu(f, mu) == pytest.approx(1.0, abs=1e-12)
    assert an.corollary1_k(f, mu) == pytest.approx(1.0, abs=1e-12)


def test_k_against_stable_oracle(stable_half):
    f = sb.compute_nu(stable_half, 1.0)
    assert an.k_f_mu(f, stable_half.measure) == pytest.approx(STABLE_K_T1, rel=1e-3)


def test_monotone_shortcut_matches_k_gamma(gamma1):
    f = sb.compute_nu(gamma1, 0.5)
    k = an.k_f_mu(f, gamma1.measure)
    assert abs(an.corollary1_k(f, gamma1.measure) - k) <= 1e-4 * (1 + k)


def test_monotone_shortcut_rejects_stable(stable_half):
    f = sb.compute_nu(stable_half, 1.0)
    with pytest.raises(PreconditionError):
        an.corollary1_k(f, stable_half.measure)


def test_origin_atom_against_infinite_measure(stable_half):
    f = _indicator()
    f = sb.GridMeasure(1, f.U, f.h, f.weights * 0.5, 0.0, 0.5)
    with pytest.raises(DensityError):
        an.k_f_mu(f, stable_half.measure)
    # finite measure: the atom adds 2 atom mu(total)
    mu = bc.make_atoms([[0.5]], [1.0]).measure
    assert an.k_f_mu(f, mu) == pytest.approx(0.5 + 2 * 0.5 * 1.0, abs=1e-12)


@pytest.mark.parametrize("name", ["stable", "gamma"])
def test_shift_integral_round_trip(name):
    psi = bc.make_stable(0.5) if name == "stable" else bc.make_gamma()
    t = 1.0 if name == "stable" else 0.5
    f = sb.compute_nu(psi, t, sb.GridSpec(U=2.0))
    rep = an.lemma1_b(f, psi)
    assert rep.l1_ok
    assert len(rep.laplace_errors) == 10 and max(rep.laplace_errors) <= 1e-4
    assert rep.operator_error <= 1e-6


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
def test_sector_and_growth_for_stable(alpha):
    psi = bc.make_stable(alpha)
    sec = an.sector_test(psi)
    fit = an.growth_fit(psi)
    assert sec.passed and sec.violations == 0 and 0 <= sec.max_arg <= np.pi
    assert abs(sec.boundary_half_angle - alpha * np.pi / 2) <= 0.01
    assert abs(fit.gamma - alpha) <= 0.02 and fit.passed


def test_sector_certificate_for_square():
    sq = bc.RawFunction(1, lambda z: z[..., 0] ** 2, "square")
    sec = an.sector_test(sq)
    assert not sec.passed and sec.violations > 0
    cert = sec.certificates[0]
    z = complex(*cert.z[0]) if isinstance(cert.z[0], list) else complex(cert.z[0])
    assert (z * z).real > 0


def test_growth_certificate_for_square():
    sq = bc.RawFunction(1, lambda z: z[..., 0] ** 2, "square")
    fit = an.growth_fit(sq)
    assert fit.gamma == pytest.approx(2.0, abs=1e-6) and not fit.passed and fit.certificates


def test_jt_scan_stable_is_flat(stable_half):
    s = an.jt_scan(stable_half, SCAN_T)
    tv = np.array([r[2] for r in s.rows])
    assert s.bounded and np.ptp(tv) < 1e-6
    assert s.csv().splitlines()[0] == "t,value,t_times_value"


def test_jt_scan_finite_measure_vanishes():
    psi = bc.make_tempered(-0.5, 1.0)
    s = an.jt_scan(psi, SCAN_T)
    tv = [r[2] for r in s.rows]
    assert s.bounded and tv[0] < 1e-2 * tv[-1]


def test_jt_refinement_stable(stable_half):
    for t in (1e-3, 0.1, 1.0):
        a = an.jt_scan(stable_half, [t], sb.GridSpec(N=2 ** 14)).rows[0][2]
        b = an.jt_scan(stable_half, [t], sb.GridSpec(N=2 ** 15)).rows[0][2]
        assert abs(a - b) < 0.02 * abs(a)


def test_k_scan_stable_is_flat(stable_half):
    s = an.sufficient2_scan(stable_half, SCAN_T[::4])
    tk = [r[2] for r in s.rows]
    assert s.bounded and max(tk) == pytest.approx(STABLE_K_T1, rel=2e-3)


def test_scan_without_smallest_decade_has_no_verdict(stable_half):
    assert an.jt_scan(stable_half, [0.5]).bounded is None


def test_full_report_member(stable_half):
    rep = an.full_report(stable_half, {"t_scan": {"min": 1e-3, "max": 1, "points": 8},
                                       "tuples": [{"kind": "diagonal", "diagonals": [[-1, -4]]}]})
    assert rep.verdict == "member" and rep.exit_code == 0 and not rep.certificates
    d = json.loads(rep.to_json())
    assert set(d) >= {"psi", "necessary", "sufficient", "operator", "verdict", "certificates"}
    assert d["operator"]["diagonal"]["bounded"]


def test_full_report_non_member():
    sq = bc.RawFunction(1, lambda z: z[..., 0] ** 2, "square")
    rep = an.full_report(sq, {"t_scan": {"min": 1e-3, "max": 1, "points": 4}})
    assert rep.verdict == "non-member" and rep.exit_code == 2 and rep.certificates


def test_full_report_single_time_is_inconclusive(stable_half):
    rep = an.full_report(stable_half, {"t_scan": {"min": 0.5, "max": 0.5, "points": 1}})
    assert rep.verdict == "inconclusive" and rep.exit_code == 1
