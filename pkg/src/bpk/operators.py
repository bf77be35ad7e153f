"""Functional calculus of Bernstein functions on commuting matrix tuples.

The Banach space is ``C^d`` with the spectral norm.  A tuple ``A`` of
commuting generators gives the semigroup ``T_A(u) = prod_j exp(u_j A_j)``;
``psi(A) = int (T_A(u) - I) dmu(u)`` and ``g_t(A) = int T_A(u) dnu_t(u)``.

Two evaluation paths are used.  When the tuple has a well-conditioned joint
eigenbasis the integrals act on the joint eigenvalues (the same quadrature as
the scalar evaluators, applied to every eigenvalue); otherwise the integrals
are summed with matrix exponentials directly.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import linalg

from . import bernstein as bc
from . import subordinator as sb
from .errors import CommutationError, ConfigError, DomainError, ParameterError, PreconditionError, WindowError

_COND_MAX = 1e8


@dataclass(frozen=True)
class EigenData:
    """Joint eigenbasis: ``A_j = V diag(lams[j]) V^-1``."""

    V: np.ndarray
    Vinv: np.ndarray
    lams: np.ndarray
    unitary: bool = False

    @property
    def cond(self) -> float:
        return 1.0 if self.unitary else float(np.linalg.norm(self.V, 2) * np.linalg.norm(self.Vinv, 2))

    def rebuild(self, values: np.ndarray) -> np.ndarray:
        return (self.V * values[None, :]) @ self.Vinv


@dataclass(frozen=True, eq=False)
class CommutingTuple:
    mats: tuple
    M_j: tuple
    commutator: float
    eig: EigenData | None = None
    label: str = ""

    @property
    def n(self) -> int:
        return len(self.mats)

    @property
    def d(self) -> int:
        return self.mats[0].shape[0]

    @property
    def M(self) -> float:
        return float(np.prod(self.M_j))

    def combined(self, a: np.ndarray) -> np.ndarray:
        return sum(aj * Aj for aj, Aj in zip(a, self.mats))


def opnorm(X: np.ndarray) -> float:
    return float(np.linalg.norm(X, 2))


def _try_eigen(mats: Sequence[np.ndarray]) -> EigenData | None:
    coeffs = 1.0 + 0.6180339887498949 * np.arange(len(mats))
    B = sum(c * A for c, A in zip(coeffs, mats))
    try:
        w, V = np.linalg.eig(B)
        Vinv = np.linalg.inv(V)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(Vinv)):
        return None
    cond = np.linalg.cond(V)
    if cond > _COND_MAX:
        return None
    lams = []
    for A in mats:
        D = Vinv @ A @ V
        diag = np.diag(D).copy()
        off = D - np.diag(diag)
        if np.abs(off).max(initial=0.0) > 1e-8 * max(1.0, np.abs(A).max()) * cond:
            return None
        lams.append(diag)
    return EigenData(V, Vinv, np.array(lams))


def _semigroup_bound(A: np.ndarray, eig_lams: np.ndarray | None, unitary: bool,
                     scan: np.ndarray) -> float:
    if eig_lams is not None and unitary:
        return float(max(1.0, np.exp(np.outer(scan, eig_lams.real)).max()))
    vals = [opnorm(linalg.expm(t * A)) for t in scan]
    return float(max([1.0] + vals))


def make_tuple(mats: Sequence[np.ndarray], t_scan: Sequence[float] | None = None,
               eig: EigenData | None = None, label: str = "") -> CommutingTuple:
    """Validate commutation, estimate ``M_j = sup_t ||exp(t A_j)||`` and find a joint eigenbasis."""
    mats = tuple(np.asarray(A, dtype=complex) for A in mats)
    d = mats[0].shape[0]
    if any(A.shape != (d, d) for A in mats):
        raise ParameterError("all matrices must be square of the same size")
    res = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            C = mats[i] @ mats[j] - mats[j] @ mats[i]
            r = opnorm(C)
            scale = max(opnorm(mats[i]) * opnorm(mats[j]), 1e-300)
            if r > 1e-10 * scale:
                raise CommutationError(f"A_{i} and A_{j} do not commute (residual {r:.3g})", (i, j))
            res = max(res, r)
    if eig is None:
        eig = _try_eigen(mats)
    scan = np.concatenate([[0.0], np.geomspace(1e-3, 1e2, 31)]) if t_scan is None else np.asarray(t_scan, float)
    M_j = tuple(_semigroup_bound(A, None if eig is None else eig.lams[j], eig is not None and eig.unitary, scan)
                for j, A in enumerate(mats))
    return CommutingTuple(mats, M_j, res, eig, label)


def make_diagonal(*diags: Sequence[float], label: str = "diagonal") -> CommutingTuple:
    lams = np.array([np.asarray(dg, dtype=complex) for dg in diags])
    d = lams.shape[1]
    I = np.eye(d, dtype=complex)
    eig = EigenData(I, I, lams, unitary=True)
    return make_tuple([np.diag(l) for l in lams], eig=eig, label=label)


def make_jordan(eigenvalue: float = -1.0, size: int = 3, nilpotent: float = 1.0) -> CommutingTuple:
    J = eigenvalue * np.eye(size) + nilpotent * np.eye(size, k=1)
    return make_tuple([J], label=f"jordan({eigenvalue:g},{size})")


def circulant_symbol(d: int, kind: str = "upwind") -> tuple[np.ndarray, float]:
    """Eigenvalues of the discretized translation generator on ``d`` points of a circle of length 2 pi."""
    h = 2 * np.pi / d
    theta = 2 * np.pi * np.arange(d) / d
    if kind == "upwind":
        return (np.exp(1j * theta) - 1.0) / h, h
    if kind == "centered":
        return 1j * np.sin(theta) / h, h
    raise ParameterError(f"unknown circulant kind {kind!r}")


def make_circulant(d: int, kind: str = "upwind") -> CommutingTuple:
    """``(S - I)/h`` (upwind) or ``(S - S^-1)/(2h)`` (centered), ``S`` the cyclic shift."""
    lam, h = circulant_symbol(d, kind)
    k = np.arange(d)
    F = np.exp(2j * np.pi * np.outer(k, k) / d) / np.sqrt(d)
    # column k of F is an eigenvector of S with eigenvalue exp(2 pi i k / d)
    A = (F * lam[None, :]) @ F.conj().T
    eig = EigenData(F, F.conj().T, lam[None, :], unitary=True)
    return make_tuple([A], eig=eig, label=f"circulant-{kind}({d})")


def make_commuting_pair(d: int = 6, seed: int = 7) -> CommutingTuple:
    """Two non-normal generators sharing a (fixed, well-conditioned) eigenbasis."""
    rng = np.random.default_rng(seed)
    V = np.eye(d) + 0.3 * rng.standard_normal((d, d))
    Vinv = np.linalg.inv(V)
    l1 = -rng.uniform(0.5, 3.0, d) + 1j * rng.uniform(-2, 2, d)
    l2 = -rng.uniform(0.5, 3.0, d) + 1j * rng.uniform(-2, 2, d)
    mats = [(V * l[None, :]) @ Vinv for l in (l1, l2)]
    return make_tuple(mats, eig=EigenData(V.astype(complex), Vinv.astype(complex), np.array([l1, l2])),
                      label="commuting-pair")


def make_selfadjoint_pair(d: int = 5, seed: int = 3) -> CommutingTuple:
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    l1 = -rng.uniform(0.5, 4.0, d)
    l2 = -rng.uniform(0.5, 4.0, d)
    mats = [(Q * l[None, :]) @ Q.T for l in (l1, l2)]
    return make_tuple(mats, eig=EigenData(Q.astype(complex), Q.T.astype(complex), np.array([l1, l2], complex),
                                          unitary=True), label="selfadjoint-pair")


# ---------------------------------------------------------------------------

def semigroup_at(A: CommutingTuple, u: Sequence[float]) -> np.ndarray:
    u = np.atleast_1d(np.asarray(u, float))
    if u.shape != (A.n,):
        raise ParameterError("u must have one entry per generator")
    if np.any(u < 0):
        raise DomainError("semigroup parameters must be nonnegative")
    T = np.eye(A.d, dtype=complex)
    for uj, Aj in zip(u, A.mats):
        if uj != 0:
            T = T @ linalg.expm(uj * Aj)
    return T


def _joint_points(A: CommutingTuple) -> np.ndarray:
    z = A.eig.lams.T.copy()                      # (d, n)
    scale = max(1.0, float(np.abs(z).max()))
    bad = z.real > 1e-10 * scale
    if np.any(bad):
        raise DomainError("a generator has spectrum in the open right half-plane")
    z.real = np.minimum(z.real, 0.0)
    return z


def _require_T0(psi):
    if not getattr(psi, "is_T0", False):
        raise PreconditionError("operator calculus is restricted to c0 = 0, c1 = 0")


def apply_psi(psi, A: CommutingTuple, method: str = "quadrature") -> np.ndarray:
    """``psi(A) = int (T_A(u) - I) dmu(u)``."""
    _require_T0(psi)
    if A.n != psi.n:
        raise ParameterError("tuple size does not match psi dimension")
    if A.eig is not None:
        vals = np.atleast_1d(bc.eval_complex(psi, _joint_points(A), method=method))
        return A.eig.rebuild(vals)
    return _psi_matrix(psi, A)


def _psi_matrix(psi, A: CommutingTuple, eps: float | None = None) -> np.ndarray:
    """Lévy-node quadrature with matrix exponentials, for non-diagonalizable tuples."""
    nrm = max(opnorm(Aj) for Aj in A.mats)
    eps = eps or 1e-8 / max(nrm, 1.0)
    W = _far_reach(psi.measure)
    absc = max(float(np.linalg.eigvals(Aj).real.max()) for Aj in A.mats)
    if absc < 0:
        W = min(W, 60.0 / -absc)
    nodes = psi.measure.nodes(eps, W)
    I = np.eye(A.d, dtype=complex)
    out = np.zeros((A.d, A.d), complex)
    for p, w in zip(nodes.points, nodes.weights):
        out += w * (_T_at(A, p) - I)
    out += sum(m * Aj for m, Aj in zip(nodes.small_first, A.mats))
    if np.isfinite(nodes.far_mass):
        out -= nodes.far_mass * I
    return out


def _far_reach(measure) -> float:
    # far enough that the neglected mass is below 1e-14
    for W in np.geomspace(1e1, 1e40, 40):
        if measure.nodes(1.0, W).far_mass < 1e-14:
            return float(W)
    return 1e40


def _T_at(A: CommutingTuple, u: np.ndarray) -> np.ndarray:
    T = np.eye(A.d, dtype=complex)
    for uj, Aj in zip(u, A.mats):
        if uj != 0:
            T = T @ linalg.expm(uj * Aj)
    return T


# ---------------------------------------------------------------------------
# subordination

def _power_sum(w: np.ndarray, E: np.ndarray) -> np.ndarray:
    """``sum_k w_k E^k`` by Horner's rule (``|E| <= 1``)."""
    return npoly.polyval(E, w)


def _scalar_g(nu: sb.GridMeasure, x: np.ndarray, start: int = 0, edge: bool = False) -> np.ndarray:
    """``int exp(x r) dnu(r)`` over cells ``k >= start`` of a radial grid measure."""
    x = np.asarray(x, complex)
    w = nu.weights
    h = nu.h
    y = x * h
    if nu.mode == "lattice":
        out = _power_sum(w[start:], np.exp(y)) * np.exp(y * start)
    else:
        d = sb.slopes(w)
        E = np.exp(y)
        off = np.exp(y * start)
        out = off * (_power_sum(w[start:], E) * sb.kappa(y) + _power_sum(d[start:], E) * sb.slope_kernel(y))
        if start == 0:
            out = out + w[0] * (sb.cell0_factor(y, nu.cell0_exponent) - sb.kappa(y))
    if start == 0:
        out = out + nu.atom0
    if edge:
        out = out + nu.defect * np.exp(x * nu.U)
    return out


def _composite_scalar(comp: sb.CompositeMeasure, x: np.ndarray) -> np.ndarray:
    out = np.zeros(np.shape(x), complex)
    for lev, (m, k0) in enumerate(zip(comp.levels, comp.starts)):
        out = out + _scalar_g(m, x, k0, edge=lev == len(comp.levels) - 1)
    return out


def _phi_mats(Y: np.ndarray):
    """``kappa(Y)`` and ``phi2(Y) = sum Y^n/(n+2)!`` from one block exponential."""
    d = Y.shape[0]
    Z = np.zeros((3 * d, 3 * d), complex)
    Z[:d, :d] = Y
    Z[:d, d:2 * d] = np.eye(d)
    Z[d:2 * d, 2 * d:] = np.eye(d)
    E = linalg.expm(Z)
    return E[:d, d:2 * d], E[:d, 2 * d:]


def _matrix_g(nu: sb.GridMeasure, B: np.ndarray, start: int = 0, edge: bool = False) -> np.ndarray:
    """``int exp(r B) dnu(r)`` over cells ``k >= start`` with matrix Horner sums."""
    d = B.shape[0]
    I = np.eye(d, dtype=complex)
    Y = nu.h * B
    E = linalg.expm(Y)
    w = nu.weights[start:]
    def horner(c):
        acc = np.zeros((d, d), complex)
        for ck in c[::-1]:
            acc = acc @ E + ck * I
        return acc
    off = linalg.expm(start * Y) if start else I
    if nu.mode == "lattice":
        out = off @ horner(w)
    else:
        K, P2 = _phi_mats(Y)
        slope = 0.5 * K - P2
        dsl = sb.slopes(nu.weights)[start:]
        out = off @ (horner(w) @ K + horner(dsl) @ slope)
        if start == 0:
            out = out + nu.weights[0] * (_cell0_matrix(Y, nu.cell0_exponent) - K)
    if start == 0:
        out = out + nu.atom0 * I
    if edge:
        out = out + nu.defect * linalg.expm(nu.U * B)
    return out


def _cell0_matrix(Y, beta, order: int = 32):
    if beta is None:
        return _phi_mats(Y)[0]
    gx, gw = np.polynomial.legendre.leggauss(order)
    v = (0.5 * (gx + 1.0)) ** (1.0 / beta)
    return sum(0.5 * g * linalg.expm(vi * Y) for vi, g in zip(v, gw))


def _tail_factor(x: np.ndarray, U: float) -> float:
    """``max_i sup_{u >= U} |exp(x_i u) - exp(x_i U)|`` bound."""
    re = x.real
    mag = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        osc = np.where(mag == 0, 0.0, np.where(re < 0, np.minimum(2.0, mag / np.abs(re)), 2.0))
    return float(np.max(np.exp(re * U) * osc))


def subordinate(psi, A: CommutingTuple, t: float, nu=None, tol: float = 1e-7,
                N: int = 2 ** 14, max_levels: int = 16) -> np.ndarray:
    """``g_t(A) = int T_A(u) dnu_t(u)`` with ``nu_t`` cells as quadrature nodes.

    Without an explicit ``nu`` a nested-window ``nu_t`` is built until the
    mass beyond the outer window, weighted by how far ``T_A`` can still move,
    is below ``tol * M``.
    """
    _require_T0(psi)
    if A.n != psi.n:
        raise ParameterError("tuple size does not match psi dimension")
    I = np.eye(A.d, dtype=complex)
    if t == 0:
        return I
    a = psi.measure.direction()
    if a is None:
        return _subordinate_nd(psi, A, t, nu)
    if A.eig is not None:
        x = _joint_points(A) @ a
        cond = A.eig.cond
        if nu is None:
            stop = lambda U, dfc: dfc * cond * _tail_factor(x, U) <= tol * A.M
            nu = sb.compute_nu_levels(psi, t, N=N, stop=stop, max_levels=max_levels)
            _check_reach(nu, x, cond, tol * A.M)
        g = _composite_scalar(nu, x) if isinstance(nu, sb.CompositeMeasure) else _scalar_g(nu, x, edge=True)
        return A.eig.rebuild(g)
    B = A.combined(a)
    if nu is None:
        def stop(U, dfc):
            return dfc * 2.0 * A.M <= tol * A.M or dfc * opnorm(linalg.expm(U * B) - linalg.expm(2 * U * B)) <= tol * A.M
        nu = sb.compute_nu_levels(psi, t, N=N, stop=stop, max_levels=max_levels)
    if isinstance(nu, sb.CompositeMeasure):
        out = np.zeros_like(I)
        for lev, (m, k0) in enumerate(zip(nu.levels, nu.starts)):
            out = out + _matrix_g(m, B, k0, edge=lev == len(nu.levels) - 1)
        return out
    return _matrix_g(nu, B, edge=True)


def _check_reach(comp: sb.CompositeMeasure, x, cond, budget):
    if comp.defect * cond * _tail_factor(x, comp.U) > budget:
        raise WindowError(f"nu_t mass {comp.defect:.3g} beyond U={comp.U:.3g} still matters for T_A",
                          suggested_U=16.0 * comp.U)


def _subordinate_nd(psi, A: CommutingTuple, t: float, nu) -> np.ndarray:
    if A.eig is None:
        raise PreconditionError("non-ray measures need a diagonalizable tuple")
    if nu is None:
        nu = sb.compute_nu(psi, t)
    g = sb.laplace(nu, _joint_points(A), tail="edge")
    return A.eig.rebuild(g)


def exp_psiA(psi, A: CommutingTuple, t: float, method: str = "quadrature") -> np.ndarray:
    """``exp(t psi(A))``, the independent route to ``g_t(A)``."""
    if t == 0:
        return np.eye(A.d, dtype=complex)
    return linalg.expm(t * apply_psi(psi, A, method=method))


@dataclass(frozen=True)
class GeneratorProbe:
    times: list
    errors: list
    rate: float | None
    passed: bool | None


def generator_probe(psi, A: CommutingTuple, times: Sequence[float], **kw) -> GeneratorProbe:
    """``||(g_t(A) - I)/t - psi(A)||`` along decreasing ``t``; first order means rate ~ 1."""
    P = apply_psi(psi, A)
    I = np.eye(A.d)
    errs = [opnorm((subordinate(psi, A, t, **kw) - I) / t - P) for t in times]
    if len(times) < 2:
        return GeneratorProbe(list(times), errs, None, None)
    good = np.array(errs) > 0
    if good.sum() < 2:
        return GeneratorProbe(list(times), errs, np.inf, True)
    rate = float(np.polyfit(np.log(np.asarray(times)[good]), np.log(np.asarray(errs)[good]), 1)[0])
    return GeneratorProbe(list(times), errs, rate, rate >= 0.8)


def flat_trend(times: Sequence[float], values: Sequence[float]) -> bool | None:
    """Bounded-as-t->0 proxy: max over the smallest decade within 2x of the median."""
    t = np.asarray(times, float)
    v = np.asarray(values, float)
    if t.size < 2:
        return None
    low = t <= t.min() * 10.0
    med = float(np.median(v))
    top = float(v[low].max())
    if med == 0:
        return top == 0
    return bool(top <= 2.0 * med)


@dataclass(frozen=True)
class YosidaScan:
    rows: list
    max_value: float
    slope: float | None
    bounded: bool | None


def yosida_scan(psi, A: CommutingTuple, times: Sequence[float], **kw) -> YosidaScan:
    """Rows ``(t, t ||psi(A) g_t(A)||)``."""
    if any(t <= 0 or t > 1 for t in times):
        raise ParameterError("the scan needs t in (0, 1]")
    P = apply_psi(psi, A)
    rows = [(float(t), float(t * opnorm(P @ subordinate(psi, A, t, **kw)))) for t in times]
    vals = [r[1] for r in rows]
    slope = None
    if len(rows) >= 2:
        tt = np.array([r[0] for r in rows])
        vv = np.array(vals)
        low = tt <= tt.min() * 10.0
        if low.sum() >= 2 and np.all(vv[low] > 0):
            slope = float(np.polyfit(np.log(tt[low]), np.log(vv[low]), 1)[0])
    bounded = flat_trend([r[0] for r in rows], vals)
    if bounded is not None and max(vals) == 0:
        bounded = True
    return YosidaScan(rows, float(max(vals)), slope, bounded)


@dataclass(frozen=True)
class NormSumReport:
    C: list
    limsup: list
    monotone: list
    weighted_sum: float
    passed: bool
    note: str = "limsup estimated by the max over the smallest sampled decade"


def norm_sum_check(A: CommutingTuple, times: Sequence[float] | None = None,
                   margin: float = 1e-3) -> NormSumReport:
    """``sum_j C_j limsup ||I - T_j(t)|| < 2`` with ``C_j = prod_{k<j} M_k``.

    A sampled max only approaches the limsup from below, so sums within
    ``margin`` of 2 are not counted as passing.
    """
    t = np.asarray(np.geomspace(1e-4, 1e-1, 31) if times is None else times, float)
    low = t <= t.min() * 10.0
    C = [float(np.prod(A.M_j[:j])) for j in range(A.n)]
    limsups, mono = [], []
    I = np.eye(A.d)
    for j, Aj in enumerate(A.mats):
        if A.eig is not None and A.eig.unitary:
            lam = A.eig.lams[j]
            vals = np.abs(1.0 - np.exp(np.outer(t, lam))).max(axis=1)
        else:
            vals = np.array([opnorm(I - linalg.expm(tk * Aj)) for tk in t])
        limsups.append(float(vals[low].max()))
        order = np.argsort(t)
        v = vals[order][low[order]]
        mono.append(bool(np.all(np.diff(v) >= -1e-12)))
    total = float(np.dot(C, limsups))
    return NormSumReport(C, limsups, mono, total, total < 2.0 - margin)


# ---------------------------------------------------------------------------
# matrix I/O

def read_matrix(path: str | Path) -> np.ndarray:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        arr = np.asarray(json.loads(text))
        if arr.ndim == 3 and arr.shape[-1] == 2:
            return arr[..., 0] + 1j * arr[..., 1]
        return arr.astype(complex)
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    vals = np.array([[float(v) for v in r] for r in rows])
    if vals.shape[1] != 2 * vals.shape[0]:
        raise ConfigError(f"{path}: expected d rows of 2d interleaved re/im values")
    return vals[:, 0::2] + 1j * vals[:, 1::2]


def write_matrix(path: str | Path, X: np.ndarray) -> None:
    X = np.asarray(X, complex)
    inter = np.empty((X.shape[0], 2 * X.shape[1]))
    inter[:, 0::2] = X.real
    inter[:, 1::2] = X.imag
    lines = [",".join(f"{v + 0.0:.17g}" for v in row) for row in inter]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_manifest(path: str | Path) -> tuple[CommutingTuple, dict]:
    path = Path(path)
    try:
        man = json.loads(path.read_text())
        files = man["files"]
    except (KeyError, json.JSONDecodeError) as exc:
        raise ConfigError(f"bad tuple manifest {path}: {exc}") from exc
    if "builtin" in man:
        return builtin_tuple(man["builtin"]), man
    mats = [read_matrix(path.parent / f) for f in files]
    if "n" in man and man["n"] != len(mats):
        raise ConfigError("manifest n does not match the file list")
    return make_tuple(mats, label=man.get("label", path.stem)), man


def builtin_tuple(spec: dict) -> CommutingTuple:
    kind = spec.get("kind")
    if kind == "diagonal":
        return make_diagonal(*spec["diagonals"])
    if kind == "jordan":
        return make_jordan(spec.get("eigenvalue", -1.0), spec.get("size", 3))
    if kind == "circulant":
        return make_circulant(int(spec["d"]), spec.get("variant", "upwind"))
    if kind == "pair":
        return make_commuting_pair(int(spec.get("d", 6)))
    if kind == "selfadjoint_pair":
        return make_selfadjoint_pair(int(spec.get("d", 5)))
    raise ConfigError(f"unknown builtin tuple {kind!r}")


def t_grid(spec: dict | None, default=(1e-3, 1.0, 20, True)) -> np.ndarray:
    lo, hi, count, log = default
    if spec:
        lo, hi = float(spec.get("min", lo)), float(spec.get("max", hi))
        count, log = int(spec.get("points", spec.get("count", count))), bool(spec.get("log", log))
    if count == 1:
        return np.array([lo])
    return np.geomspace(lo, hi, count) if log else np.linspace(lo, hi, count)
