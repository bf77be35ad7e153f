"""Property tests for the invariants shared by every module."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from bpk import bernstein as bc
from bpk import cli
from bpk import operators as op
from bpk import subordinator as sb

alphas = st.floats(0.05, 0.95)
rates = st.floats(0.2, 5.0)


@st.composite
def bernstein_1d(draw):
    kind = draw(st.sampled_from(["stable", "gamma", "tempered", "finite", "atoms"]))
    if kind == "stable":
        return bc.make_stable(draw(alphas))
    if kind == "gamma":
        return bc.make_gamma()
    if kind == "tempered":
        return bc.make_tempered(draw(alphas), draw(rates), draw(st.floats(0.1, 3.0)))
    if kind == "finite":
        return bc.make_tempered(-draw(alphas), draw(rates))
    k = draw(st.integers(1, 4))
    locs = draw(st.lists(st.floats(0.05, 5.0), min_size=k, max_size=k))
    wts = draw(st.lists(st.floats(0.01, 3.0), min_size=k, max_size=k))
    return bc.make_atoms([[v] for v in locs], wts)


left_points = st.builds(complex, st.floats(-20.0, 0.0), st.floats(-50.0, 50.0))


@given(bernstein_1d(), st.lists(left_points, min_size=1, max_size=8))
def test_conjugate_symmetry(psi, zs):
    z = np.array(zs)
    a = bc.eval_complex(psi, z)
    b = bc.eval_complex(psi, np.conj(z))
    assert np.allclose(b, np.conj(a), rtol=1e-12, atol=1e-13)


@given(bernstein_1d(), st.lists(left_points, min_size=1, max_size=8))
def test_range_in_closed_left_half_plane(psi, zs):
    v = bc.eval_complex(psi, np.array(zs))
    assert np.all(v.real <= 1e-10 * np.maximum(1.0, np.abs(v)))


@given(bernstein_1d())
def test_monotone_to_zero_at_origin(psi):
    s = -np.geomspace(10.0, 1e-200, 60)
    v = bc.eval_real(psi, s)
    assert np.all(np.diff(v) >= -1e-12 * np.maximum(1.0, np.abs(v[:-1])))
    assert abs(v[-1]) <= 1e-8
    assert bc.eval_real(psi, 0.0) == 0.0


@given(bernstein_1d(), bernstein_1d(), st.floats(0.0, 4.0), st.floats(0.0, 4.0),
       st.lists(st.floats(-15.0, -1e-3), min_size=1, max_size=6))
def test_cone_law(psi, phi, a, b, ss):
    s = np.array(ss)
    combo = bc.linear_combine([(a, psi), (b, phi)])
    want = a * bc.eval_real(psi, s) + b * bc.eval_real(phi, s)
    got = bc.eval_real(combo, s)
    assert np.allclose(got, want, rtol=1e-12, atol=1e-14)


@settings(max_examples=15)
@given(st.floats(0.1, 2.0), st.floats(0.1, 2.0))
def test_convolution_commutes_exactly(s, t):
    spec = sb.GridSpec(N=2 ** 9, U=60.0)
    g = bc.make_gamma()
    a, b = sb.compute_nu(g, s, spec), sb.compute_nu(g, t, spec)
    ab, ba = sb.convolve(a, b), sb.convolve(b, a)
    assert np.array_equal(ab.weights, ba.weights) and ab.defect == ba.defect


@settings(max_examples=15)
@given(st.sampled_from(["stable", "gamma", "tempered"]), st.floats(0.25, 2.0))
def test_mass_conservation(kind, t):
    psi = {"stable": bc.make_stable(0.5), "gamma": bc.make_gamma(),
           "tempered": bc.make_tempered(0.5, 1.0)}[kind]
    m = sb.compute_nu(psi, t, sb.GridSpec(N=2 ** 12))
    assert np.all(m.weights >= 0)
    assert abs(m.mass + m.defect - 1.0) <= 1e-6


@given(st.lists(st.builds(complex, st.floats(-3, -0.05), st.floats(-2, 2)), min_size=1, max_size=4),
       st.lists(st.floats(-1, 1), min_size=4, max_size=4), st.floats(0.0, 20.0))
def test_sup_norm_dominates_samples(exps, coefs, r):
    p = sb.ExponentialPolynomial(coefs[:len(exps)], np.array(exps)[:, None])
    assert abs(p(r)) <= p.sup * (1 + 1e-9) + 1e-15


@settings(max_examples=20)
@given(st.lists(st.floats(-5.0, -0.05), min_size=2, max_size=5), st.floats(1e-3, 1.0))
def test_diagonal_subordinate_bound_and_commutation(lams, t):
    A = op.make_diagonal(lams)
    G = op.subordinate(bc.make_stable(0.5), A, t)
    assert op.opnorm(G) <= A.M * (1 + 1e-6)
    T = op.semigroup_at(A, [0.3])
    assert op.opnorm(G @ T - T @ G) <= 1e-8 * A.M


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_csv_number_format_round_trips(x):
    assert float(cli._fmt(x)) == x + 0.0
