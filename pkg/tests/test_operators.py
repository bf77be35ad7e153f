import json

import numpy as np
import pytest
from scipy import linalg

from bpk import bernstein as bc
from bpk import operators as op
from bpk.errors import CommutationError, DomainError, ParameterError

FAMILIES = [bc.make_stable(0.5), bc.make_gamma()]


def _tuples():
    return [op.make_diagonal([-1.0, -4.0, -0.3 + 2j]), op.make_jordan(), op.make_circulant(64),
            op.make_commuting_pair()]


def _lift(psi, A):
    """Same family along the diagonal ray when the tuple has two generators."""
    if A.n == 1:
        return psi
    return bc.make_stable(0.5, (1.0, 1.0)) if psi.label.startswith("stable") else bc.make_gamma((1.0, 1.0))


def test_semigroup_at_matches_expm_in_either_order():
    A = op.make_commuting_pair()
    u = [0.3, 0.7]
    E1, E2 = linalg.expm(u[0] * A.mats[0]), linalg.expm(u[1] * A.mats[1])
    T = op.semigroup_at(A, u)
    assert np.allclose(T, E1 @ E2, atol=1e-12) and np.allclose(T, E2 @ E1, atol=1e-12)
    assert np.allclose(op.semigroup_at(A, [0.0, 0.0]), np.eye(A.d))
    with pytest.raises(DomainError):
        op.semigroup_at(A, [-1.0, 0.0])
    with pytest.raises(ParameterError):
        op.semigroup_at(A, [1.0])


def test_diagonal_semigroup():
    A = op.make_diagonal([-1.0, -4.0])
    assert np.allclose(op.semigroup_at(A, [0.5]), np.diag(np.exp([-0.5, -2.0])), atol=1e-15)


def test_apply_psi_diagonal():
    A = op.make_diagonal([-1.0, -4.0])
    P = op.apply_psi(bc.make_stable(0.5), A)
    assert np.allclose(P, np.diag([-1.0, -2.0]), atol=1e-8)


def test_apply_psi_single_atom_is_shift_minus_identity():
    J = op.make_jordan()
    psi = bc.make_atoms([[1.0]], [1.0])
    assert np.allclose(op.apply_psi(psi, J), linalg.expm(J.mats[0]) - np.eye(3), atol=1e-12)


def test_apply_psi_matrix_path_jordan():
    # psi(J) = psi(-1) I + psi'(-1) N + psi''(-1)/2 N^2 for psi = -(-s)^(1/2)
    J = op.make_jordan()
    P = op.apply_psi(bc.make_stable(0.5), J)
    ref = np.array([[-1.0, 0.5, 0.125], [0, -1.0, 0.5], [0, 0, -1.0]])
    assert np.abs(P - ref).max() <= 1e-7


def test_spectral_consistency():
    A = op.make_commuting_pair()
    psi = bc.make_gamma((1.0, 0.5))
    P = op.apply_psi(psi, A)
    z = A.eig.lams.T
    want = np.sort_complex(np.asarray(bc.eval_complex(psi, z)))
    got = np.sort_complex(np.linalg.eigvals(P))
    assert np.abs(got - want).max() <= 1e-8


def test_jordan_subordinate_against_taylor_oracle():
    # exp(t psi) and its first two derivatives at -1, t = 1
    G = op.subordinate(bc.make_stable(0.5), op.make_jordan(), 1.0)
    ref = np.exp(-1.0) * np.array([[1.0, 0.5, 0.25], [0, 1.0, 0.5], [0, 0, 1.0]])
    assert np.abs(G - ref).max() <= 1e-6


@pytest.mark.parametrize("psi", FAMILIES, ids=lambda p: p.label)
@pytest.mark.parametrize("t", [0.25, 1.0])
def test_oracle_equivalence(psi, t):
    for A in _tuples():
        G = op.subordinate(_lift(psi, A), A, t)
        E = op.exp_psiA(_lift(psi, A), A, t)
        assert op.opnorm(G - E) <= 1e-4 * A.M, A.label


def test_uniform_bound():
    psi = bc.make_stable(0.5)
    A = op.make_commuting_pair()
    pair = _lift(psi, A)
    for t in np.geomspace(1e-3, 1, 5):
        assert op.opnorm(op.subordinate(pair, A, t)) <= A.M * (1 + 1e-6)
    C = op.make_circulant(64)
    for t in (0.01, 0.1, 1.0):
        assert op.opnorm(op.subordinate(psi, C, t)) <= C.M * (1 + 1e-6)


def test_commutes_with_generator_semigroups():
    A = op.make_commuting_pair()
    G = op.subordinate(bc.make_gamma((1.0, 2.0)), A, 0.5)
    for j in range(A.n):
        T = linalg.expm(0.4 * A.mats[j])
        assert op.opnorm(G @ T - T @ G) <= 1e-8 * A.M


def test_generator_probe_rate():
    A = op.make_diagonal([-1.0, -4.0])
    rep = op.generator_probe(bc.make_stable(0.5), A, [1e-1, 1e-2, 1e-3, 1e-4])
    assert rep.rate >= 0.8 and rep.passed
    one = op.generator_probe(bc.make_stable(0.5), A, [1e-2])
    assert one.rate is None and one.passed is None


def test_yosida_scan_bounded_and_vanishing():
    A = op.make_diagonal([-1.0, -4.0, -30.0])
    times = np.geomspace(1e-3, 1, 8)
    st = op.yosida_scan(bc.make_stable(0.5), A, times)
    assert st.bounded and st.max_value < 1.0
    fin = op.yosida_scan(bc.make_atoms([[1.0]], [1.0]), A, times)
    assert fin.rows[0][1] < 1e-2 and fin.bounded
    with pytest.raises(ParameterError):
        op.yosida_scan(bc.make_stable(0.5), A, [0.0, 0.5])


def test_flat_trend():
    t = np.geomspace(1e-3, 1, 20)
    assert op.flat_trend(t, np.ones(20))
    assert not op.flat_trend(t, 1 / t)
    assert op.flat_trend([0.1], [1.0]) is None


def test_norm_sum_selfadjoint_passes():
    rep = op.norm_sum_check(op.make_selfadjoint_pair())
    assert rep.passed and rep.weighted_sum < 2.0 and rep.C == [1.0, 1.0]


def test_norm_sum_translation_family_fails_as_d_grows():
    times = np.geomspace(1e-2, 1, 21)
    sums = [op.norm_sum_check(op.make_circulant(d, "centered"), times).weighted_sum for d in (64, 256, 1024)]
    assert sums[0] < sums[-1] and sums[-1] >= 1.9
    assert not op.norm_sum_check(op.make_circulant(1024, "centered"), times).passed


def test_commutation_error_names_pair():
    A = np.diag([1.0, 2.0])
    B = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(CommutationError) as exc:
        op.make_tuple([A, A, B])
    assert exc.value.pair == (0, 2)


def test_right_half_plane_rejected():
    with pytest.raises(DomainError):
        op.apply_psi(bc.make_stable(0.5), op.make_diagonal([0.5, -1.0]))


def test_matrix_io_round_trip(tmp_path):
    X = np.random.default_rng(1).standard_normal((4, 4)) + 1j * np.random.default_rng(2).standard_normal((4, 4))
    op.write_matrix(tmp_path / "x.csv", X)
    assert np.array_equal(op.read_matrix(tmp_path / "x.csv"), X)
    J = op.make_jordan()
    op.write_matrix(tmp_path / "j.csv", J.mats[0])
    (tmp_path / "m.json").write_text(json.dumps({"n": 1, "d": 3, "files": ["j.csv"]}))
    A, man = op.load_manifest(tmp_path / "m.json")
    assert A.n == 1 and np.array_equal(A.mats[0], J.mats[0])


def test_t_grid():
    assert np.allclose(op.t_grid({"min": 1e-3, "max": 1, "points": 4, "log": True}), [1e-3, 1e-2, 1e-1, 1])
    assert op.t_grid(None).shape == (20,)
