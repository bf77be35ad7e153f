"""Numerical necessary and sufficient tests for the holomorphic-generator class.

Necessary side: the sector and growth conditions on ``psi`` over the closed
left orthant.  Sufficient side: the ``t J_t`` and ``t k(f_t, mu)`` scans, whose
boundedness as ``t -> 0+`` is judged by a flat-trend proxy.  ``full_report``
runs everything and composes a three-way verdict.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import bernstein as bc
from . import operators as op
from . import quadrature as rq
from . import subordinator as sb
from .errors import BPKError, DensityError, ParameterError, PreconditionError, ResolutionError, ShapeError
from .parallel import pmap

HALF_PI = 0.5 * np.pi
DEFAULT_BETAS = tuple(10.0 ** np.arange(-3, 2))


# ---------------------------------------------------------------------------
# sample meshes of the closed left orthant

def _arc(n_arc: int) -> np.ndarray:
    return np.linspace(HALF_PI, 3 * HALF_PI, n_arc)


def _directions(n: int, count: int = 7) -> np.ndarray:
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        chi = np.linspace(0.0, HALF_PI, count)
        return np.stack([np.cos(chi), np.sin(chi)], axis=1)
    rng = np.random.default_rng(12345)
    d = np.abs(rng.standard_normal((count * n, n)))
    d = np.vstack([np.eye(n), np.ones((1, n)), d])
    return d / np.linalg.norm(d, axis=1, keepdims=True)


def sphere_slice(n: int, R: float, n_arc: int = 721, n_dir: int = 7, n_mixed: int = 25) -> np.ndarray:
    """Points with ``||z|| = R`` and ``Re z_j <= 0``.

    Common-phase arcs ``R d e^{i phi}`` for nonnegative unit ``d``, plus (for
    ``n > 1``) a product mesh of independent phases per coordinate.
    """
    phi = _arc(n_arc)
    d = _directions(n, n_dir)
    pts = (R * d[:, None, :] * np.exp(1j * phi)[None, :, None]).reshape(-1, n)
    if n > 1:
        ph = _arc(n_mixed)
        grids = np.meshgrid(*([ph] * n), indexing="ij")
        phases = np.exp(1j * np.stack([g.ravel() for g in grids], axis=1))
        mixed = (R * d[:, None, :] * phases[None, :, :]).reshape(-1, n)
        pts = np.vstack([pts, mixed])
    return pts


def _boundary_mask(z: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    return np.all(np.abs(z.real) <= tol * np.maximum(np.abs(z), 1.0), axis=-1)


def _values(psi, z: np.ndarray) -> np.ndarray:
    z = z.copy()
    z.real = np.minimum(z.real, 0.0)    # cos(pi/2) roundoff
    return np.atleast_1d(bc.eval_complex(psi, z, method="auto"))


@dataclass
class Certificate:
    test: str
    z: list
    psi: list
    reason: str


def _cert(test, z, val, reason) -> Certificate:
    z = np.atleast_1d(z)
    return Certificate(test, [[float(v.real), float(v.imag)] for v in z],
                       [float(np.real(val)), float(np.imag(val))], reason)


# ---------------------------------------------------------------------------
# necessary conditions

@dataclass
class SectorReport:
    beta: float
    max_arg: float
    opening: float
    boundary_half_angle: float
    violations: int
    per_beta: list
    sample: str
    certificates: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.max_arg < HALF_PI


def sector_test(psi, betas: Sequence[float] = DEFAULT_BETAS,
                radii: Sequence[float] | None = None, n_arc: int = 721,
                sign_tol: float = 1e-12) -> SectorReport:
    """Smallest sector ``beta + {|arg(-z)| < theta}`` containing the sampled range of ``psi``."""
    radii = np.geomspace(0.1, 1e3, 17) if radii is None else np.asarray(radii, float)
    z = np.vstack([sphere_slice(psi.n, R, n_arc) for R in radii])
    vals = _values(psi, z)
    scale = np.maximum(np.abs(vals), 1.0)
    bad = vals.real > sign_tol * scale
    certs = []
    if np.any(bad):
        i = int(np.argmax(np.where(bad, vals.real, -np.inf)))
        certs.append(_cert("sector", z[i], vals[i], "Re psi(z) > 0"))
    per_beta = []
    for beta in betas:
        if beta <= 0:
            raise ParameterError("beta must be positive")
        args = np.abs(np.angle(beta - vals))
        per_beta.append((float(beta), float(args.max())))
    best = min(per_beta, key=lambda r: r[1])
    bmask = _boundary_mask(z) & (np.abs(vals) > 1e-300)
    half = float(np.abs(np.angle(-vals[bmask])).max()) if np.any(bmask) else 0.0
    if not certs and best[1] >= HALF_PI - 1e-12:
        args = np.abs(np.angle(best[0] - vals))
        i = int(np.argmax(args))
        certs.append(_cert("sector", z[i], vals[i], f"no sector below pi/2 for beta={best[0]:g}"))
    desc = f"{len(radii)} radii in [{radii.min():g}, {radii.max():g}], {n_arc} points per arc, {len(z)} points"
    return SectorReport(best[0], best[1], 2 * (HALF_PI - best[1]), half, int(bad.sum()),
                        per_beta, desc, certs)


@dataclass
class GrowthFit:
    radii: list
    max_modulus: list
    gamma: float
    K: float
    residual: float
    flat: bool = False
    certificates: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.flat or self.gamma < 1.0


def growth_fit(psi, radii: Sequence[float] | None = None, n_arc: int = 721) -> GrowthFit:
    """Least-squares fit of ``log max_{||z||=R} |psi(z)| = log K + gamma log R``."""
    radii = np.geomspace(1.0, 1e3, 13) if radii is None else np.asarray(radii, float)
    if radii.size < 5 or np.any(radii < 1):
        raise ParameterError("growth fit needs at least 5 radii, all >= 1")
    mods, argmax = [], []
    for R in radii:
        z = sphere_slice(psi.n, R, n_arc)
        v = np.abs(_values(psi, z))
        i = int(np.argmax(v))
        mods.append(float(v[i]))
        argmax.append(z[i])
    mods = np.array(mods)
    if np.all(mods < 1e-12):
        return GrowthFit(radii.tolist(), mods.tolist(), 0.0, 0.0, 0.0, True)
    logm = np.log(np.maximum(mods, 1e-300))
    A = np.stack([np.ones_like(radii), np.log(radii)], axis=1)
    coef, *_ = np.linalg.lstsq(A, logm, rcond=None)
    res = float(np.abs(A @ coef - logm).max())
    fit = GrowthFit(radii.tolist(), mods.tolist(), float(coef[1]), float(np.exp(coef[0])), res)
    if not fit.passed:
        i = len(radii) - 1
        val = _values(psi, argmax[i][None, :])[0]
        fit.certificates.append(_cert("growth", argmax[i], val, f"fitted exponent {fit.gamma:.4g} >= 1"))
    return fit


# ---------------------------------------------------------------------------
# flat-trend rule shared by the scans

@dataclass
class Scan:
    name: str
    rows: list
    bounded: bool | None
    extra: dict = field(default_factory=dict)

    def csv(self) -> str:
        return sb.scan_csv(self.rows, header="t,value,t_times_value")


def _scan(name, times, fn, threads=None) -> Scan:
    times = [float(t) for t in times]
    if any(t <= 0 for t in times):
        raise ParameterError("scans need t > 0")
    def safe(t):
        try:
            return fn(t)
        except BPKError as exc:
            return None, {"error": f"{exc.kind}: {exc}"}

    results = pmap(safe, times, threads)
    rows = [(t, v, t * v) for t, (v, _) in zip(times, results) if v is not None]
    extras = [e for _, e in results]
    done = [r[0] for r in rows]
    # the proxy needs the smallest decade of the requested scan
    if not done or min(done) > 10.0 * min(times):
        bounded = None
    else:
        bounded = op.flat_trend(done, [r[2] for r in rows])
    return Scan(name, rows, bounded, {"per_t": extras, "failed": len(times) - len(rows)})


def jt_scan(psi, times: Sequence[float], grid: sb.GridSpec | None = None, threads=None) -> Scan:
    """Rows ``(t, J_t, t J_t)`` with ``J_t`` the total variation of ``d nu_t/dt``."""
    def one(t):
        p = sb.compute_nu_derivative(psi, t, grid)
        inside = sb.tv_norm(p)
        return inside + abs(p.defect), {"inside": inside, "tail": p.defect, "leakage": p.leakage, "U": p.U}
    return _scan("jt", times, one, threads)


# ---------------------------------------------------------------------------
# k(f, mu) and friends

def _radial_coords(points: np.ndarray, a: np.ndarray | None) -> np.ndarray:
    if a is None:
        return points
    return (points @ a / (a @ a))[:, None]


def _masses(f: sb.GridMeasure) -> np.ndarray:
    m = np.array(f.weights, float)
    if f.mode == "lattice":
        m[(0,) * m.ndim] += f.atom0
    return m


def _split(u: np.ndarray, h: float, lattice: bool):
    c = u / h
    j = np.floor(c + 1e-12).astype(int)
    th = np.clip(c - j, 0.0, 1.0)
    if lattice:
        r = np.rint(c)
        if np.any(np.abs(c - r) > 1e-9 * np.maximum(c, 1.0)):
            raise ParameterError("lattice measures can only be shifted by lattice vectors")
        j, th = r.astype(int), np.zeros_like(c)
    return j, th


def _shifted(m: np.ndarray, j: np.ndarray, th: np.ndarray, size: int) -> np.ndarray:
    """Masses of the piecewise-constant density shifted by ``(j + th) h``, on ``size`` cells per axis."""
    d = m.ndim
    N = m.shape[0]
    out = np.zeros((size,) * d)
    for corner in np.ndindex(*(2,) * d):
        wgt = 1.0
        for c, t in zip(corner, th):
            wgt *= t if c else 1.0 - t
        if wgt == 0.0:
            continue
        dst, src = [], []
        for c, jj in zip(corner, j):
            lo = jj + c
            hi = min(lo + N, size)
            if hi <= lo:
                break
            dst.append(slice(lo, hi))
            src.append(slice(0, hi - lo))
        else:
            out[tuple(dst)] += wgt * m[tuple(src)]
    return out


def _shift_distance(m: np.ndarray, j: np.ndarray, th: np.ndarray, size: int) -> float:
    """``int |f(r - u) - f(r)| dr``: each cell splits into ``2^d`` boxes of constant shifted value."""
    base = _pad(m, size)
    out = 0.0
    for corner in np.ndindex(*(2,) * m.ndim):
        wgt = 1.0
        for c, t in zip(corner, th):
            wgt *= t if c else 1.0 - t
        if wgt:
            out += wgt * float(np.abs(_shifted(m, j + np.array(corner), np.zeros(m.ndim), size) - base).sum())
    return out


def _pad(m: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros((size,) * m.ndim)
    out[(slice(0, m.shape[0]),) * m.ndim] = m
    return out


def _axis_diff(m: np.ndarray, ax: int) -> np.ndarray:
    """``m_{k-1} - m_k`` along ``ax`` on one extra cell (zero below the first)."""
    p = _pad(m, m.shape[0] + 1)
    return np.roll(p, 1, axis=ax) - p


def _levy_nodes(mu, f: sb.GridMeasure, reach: float = 1.0):
    h = f.h
    W = f.U if f.direction is None or f.dim > 1 else f.U * float(np.linalg.norm(f.direction))
    nodes = mu.nodes(1e-3 * h, reach * W)
    if not np.all(np.isfinite(nodes.small_first)):
        raise ResolutionError("Lévy measure too singular at the origin for this grid")
    a = f.direction if f.dim == 1 and f.n > 1 else None
    pts = _radial_coords(np.asarray(nodes.points, float).reshape(-1, f.n), a)
    small = np.atleast_1d(nodes.small_first)
    if a is not None:
        small = np.array([small @ a / (a @ a)])
    far = nodes.far_mass if np.isfinite(nodes.far_mass) else 0.0
    return pts, np.asarray(nodes.weights, float), small, far


def _check_grid(f: sb.GridMeasure, mu):
    if f.dim == 1 and f.n > 1 and f.direction is None:
        raise ShapeError("1-d grid for an n-d measure needs a ray direction")
    if f.dim > 1 and f.dim != mu.n:
        raise ShapeError("grid and Lévy measure dimensions differ")
    if np.any(np.asarray(f.weights) < 0):
        raise ParameterError("k(f, mu) needs a nonnegative f")


def _tail_share(mu, f: sb.GridMeasure):
    """``u -> mu(u, inf) / mu(U, inf)`` for a ray law on a radial grid, else None.

    Called with ``None`` it returns the share at the far reach of the nodes.
    """
    if not isinstance(mu, bc.RayLaw) or f.dim != 1:
        return None
    base = rq.far_mass(f.U, mu.alpha, mu.lam, mu.C)
    if not 0 < base < np.inf:
        return None

    def share(u):
        r = f.U if u is None else max(u, f.U)
        return rq.far_mass(r, mu.alpha, mu.lam, mu.C) / base
    return share


def k_f_mu(f: sb.GridMeasure, mu) -> float:
    """``int int |f(r - u) - f(r)| dr dmu(u)`` for the piecewise-constant density of ``f``."""
    _check_grid(f, mu)
    m = _masses(f)
    total = float(m.sum())
    if total == 0.0:
        return 0.0
    N = m.shape[0]
    lattice = f.mode == "lattice"
    pts, w, small, far = _levy_nodes(mu, f)
    # a shift u past the window leaves f overlapping itself only through the
    # mass beyond u, so the distance is 2 (full mass - D(u)); D(u) follows
    # the Lévy tail when the measure is a ray law
    D = max(float(f.defect), 0.0)
    full = total + D
    tail = _tail_share(mu, f) if D > 0 else None
    acc = 0.0
    for u, wi in zip(pts, w):
        j, th = _split(u, f.h, lattice)
        if np.any(j >= N):
            acc += wi * 2.0 * (full - (D * tail(float(np.max(u))) if tail else 0.0))
            continue
        size = N + int(j.max()) + 1
        acc += wi * _shift_distance(m, j, th, size)
    slope = sum(float(np.abs(_axis_diff(m, ax)).sum()) * small[ax] / f.h for ax in range(m.ndim))
    # int_far D(u) dmu(u) = D mu(far)^2 / (2 mu(beyond U)) under the tail model
    far_overlap = D * tail(None) * far / 2.0 if tail and far else 0.0
    k = acc + slope + 2.0 * full * far - 2.0 * far_overlap
    if not np.isfinite(k):
        raise ResolutionError("k(f, mu) diverges on this grid")
    atom = 0.0 if lattice else f.atom0
    if atom:
        mass = mu.total_mass()
        if not np.isfinite(mass):
            raise DensityError(f"origin atom {atom:.3g} against an infinite Lévy measure")
        k += 2.0 * atom * mass
    return float(k)


@dataclass
class ShiftIntegral:
    b: sb.SignedGridMeasure
    b_l1: float
    k: float
    laplace_points: list
    laplace_errors: list
    operator_error: float | None
    outside: float

    @property
    def l1_ok(self) -> bool:
        return self.b_l1 <= self.k * (1 + 1e-12) + 1e-15


def _pc_laplace(m: np.ndarray, h: float, x: np.ndarray) -> np.ndarray:
    """Exact Laplace transform of a 1-d piecewise-constant density with cell masses ``m``."""
    x = np.asarray(x, complex)
    y = x * h
    E = np.exp(np.outer(x, np.arange(m.shape[0]) * h))
    return (E @ m) * sb.kappa(y)


def lemma1_b(f: sb.GridMeasure, psi, probes: Sequence[float] | None = None,
             tuple_diag: Sequence[float] | None = (-1.0, -4.0)) -> ShiftIntegral:
    """``b(r) = int (f(r - u) - f(r)) dmu(u)`` on a grid of ``2N`` cells, with its checks.

    The Laplace probes compare ``Lb(-s)`` with ``psi(s) Lf(-s)``, both sides
    taken with the same piecewise-constant density model.  The operator probe
    is ``||h(A) - psi(A) g(A)||`` on ``A = diag(tuple_diag)``.
    """
    mu = psi.measure
    _check_grid(f, mu)
    if f.dim != 1:
        raise ShapeError("lemma1_b is implemented on 1-d (ray) grids")
    m = _masses(f)
    N = m.shape[0]
    size = 2 * N
    lattice = f.mode == "lattice"
    pts, w, small, far = _levy_nodes(mu, f, reach=1e8)
    b = np.zeros(size)
    base = _pad(m, size)
    # shifts past the window are kept exactly, as copies of f outside the grid
    out_u, out_w = [], []
    for u, wi in zip(pts, w):
        if np.any(u >= f.U):
            out_u.append(float(u[0]))
            out_w.append(wi)
            b -= wi * base
            continue
        j, th = _split(u, f.h, lattice)
        b += wi * (_shifted(m, j, th, size) - base)
    b += (small[0] / f.h) * _pad(_axis_diff(m, 0), size)
    b -= far * base
    out_u, out_w = np.array(out_u), np.array(out_w)
    outside = float(out_w.sum() + far) * float(m.sum())
    atom = 0.0 if lattice else f.atom0
    if atom:
        raise DensityError("lemma1_b needs f without an origin atom")
    k = k_f_mu(f, mu)
    bm = sb.SignedGridMeasure(f.n, 2 * f.U, f.h, b, 0.0, 0.0, f.direction, f.mode, f.t)
    probes = np.linspace(-0.1, -3.0, 10) if probes is None else np.asarray(probes, float)
    a = f.direction if f.n > 1 else np.ones(1)
    x = probes
    zpts = (x / a.sum())[:, None] * np.ones(f.n)
    ps = bc.eval_real(psi, zpts)
    if lattice:
        Lb = np.exp(np.outer(x, np.arange(size) * f.h)) @ b
        Lf = np.exp(np.outer(x, np.arange(N) * f.h)) @ m
    else:
        Lb = _pc_laplace(b, f.h, x)
        Lf = _pc_laplace(m, f.h, x)
    Lb = Lb + Lf * (np.exp(np.outer(x, out_u)) @ out_w)
    errs = np.abs(Lb - ps * Lf)
    op_err = None
    if tuple_diag is not None:
        lam = np.asarray(tuple_diag, complex)
        A = op.make_diagonal(*([lam] * f.n)) if f.n > 1 else op.make_diagonal(lam)
        xl = lam * a.sum()
        if lattice:
            hb = np.exp(np.outer(xl, np.arange(size) * f.h)) @ b
            gf = np.exp(np.outer(xl, np.arange(N) * f.h)) @ m
        else:
            hb = _pc_laplace(b, f.h, xl)
            gf = _pc_laplace(m, f.h, xl)
        hb = hb + gf * (np.exp(np.outer(xl, out_u)) @ out_w)
        P = op.apply_psi(psi, A)
        op_err = op.opnorm(np.diag(hb) - P @ np.diag(gf)) / A.M
    return ShiftIntegral(bm, float(np.abs(b).sum() + outside), k, x.tolist(), errs.tolist(), op_err, outside)


def _monotone_violation(m: np.ndarray, h: float, tol: float):
    for ax in range(m.ndim):
        inc = np.diff(m, axis=ax)
        bad = np.argwhere(inc > tol)
        if bad.size:
            idx = bad[0].copy()
            idx[ax] += 1
            r = (idx * h).tolist()
            u = [h if i == ax else 0.0 for i in range(m.ndim)]
            return r, u
    return None


def corollary1_k(f: sb.GridMeasure, mu, tol: float = 1e-5) -> float:
    """``2 int_mu int_{Gamma_u} f``, valid when ``f`` decreases along every shift.

    Monotonicity is checked cell by cell; rises below ``tol`` times the largest
    cell mass are treated as inversion noise.
    """
    _check_grid(f, mu)
    m = _masses(f)
    total = float(m.sum())
    if total == 0.0:
        return 0.0
    bad = _monotone_violation(m, f.h, tol * float(m.max()))
    if bad is not None:
        r, u = bad
        raise PreconditionError(f"f(r - u) < f(r) at r={r}, u={u}: the density is not shift-monotone")
    lattice = f.mode == "lattice"
    pts, w, small, far = _levy_nodes(mu, f)
    T = m.copy()
    for ax in range(m.ndim):
        T = np.flip(np.cumsum(np.flip(T, ax), axis=ax), ax)
    T = _pad(T, m.shape[0] + 1)
    N = m.shape[0]
    acc = 0.0
    for u, wi in zip(pts, w):
        j, th = _split(u, f.h, lattice)
        if np.any(j >= N):
            acc += wi * 2.0 * total
            continue
        S = 0.0
        for corner in np.ndindex(*(2,) * m.ndim):
            wgt = 1.0
            for c, t in zip(corner, th):
                wgt *= t if c else 1.0 - t
            if wgt:
                S += wgt * T[tuple(jj + c for jj, c in zip(j, corner))]
        acc += wi * 2.0 * (total - S)
    slab = 0.0
    for ax in range(m.ndim):
        first = np.take(m, 0, axis=ax).sum()
        slab += small[ax] / f.h * float(first)
    k = acc + 2.0 * slab + 2.0 * total * far
    atom = 0.0 if lattice else f.atom0
    if atom:
        mass = mu.total_mass()
        if not np.isfinite(mass):
            raise DensityError(f"origin atom {atom:.3g} against an infinite Lévy measure")
        k += 2.0 * atom * mass
    return float(k)


def sufficient2_scan(psi, times: Sequence[float], grid: sb.GridSpec | None = None,
                     atom_tol: float = 1e-6, threads=None) -> Scan:
    """Rows ``(t, k(f_t, mu), t k(f_t, mu))``."""
    finite = np.isfinite(psi.measure.total_mass())

    def one(t):
        f = sb.compute_nu(psi, t, grid)
        if f.atom0 > atom_tol and not finite:
            raise DensityError(f"nu_t has an origin atom {f.atom0:.3g} above {atom_tol:g}")
        return k_f_mu(f, psi.measure), {"U": f.U, "defect": f.defect, "atom0": f.atom0}
    return _scan("kfmu", times, one, threads)


def derivative_norm_scan(psi, times: Sequence[float], grid: sb.GridSpec | None = None, threads=None) -> Scan:
    """Rows ``(t, ||nu_t'||, t ||nu_t'||)`` inside the window; the tail is reported per row."""
    def one(t):
        p = sb.compute_nu_derivative(psi, t, grid)
        return sb.tv_norm(p), {"tail": p.defect}
    return _scan("derivative_tv", times, one, threads)


def _derivative_from_jt(jt: Scan) -> Scan:
    per = [e for e in jt.extra["per_t"] if "inside" in e]
    rows = [(t, e["inside"], t * e["inside"]) for (t, _, _), e in zip(jt.rows, per)]
    bounded = op.flat_trend([r[0] for r in rows], [r[2] for r in rows]) if jt.bounded is not None else None
    return Scan("derivative_tv", rows, bounded, {"per_t": [{"tail": e["tail"]} for e in per]})


def k_lower_scan(psi, times: Sequence[float], budget: int = 32, seed: int = 0,
                 max_terms: int = 8, grid: sb.GridSpec | None = None) -> Scan:
    """Rows ``(t, K_lower, t K_lower)``; a lower bound only, never evidence of membership."""
    def one(t):
        nu = sb.compute_nu(psi, t, grid)
        kb = sb.estimate_K(nu, psi, budget=budget, seed=seed, max_terms=max_terms)
        return kb.value, {"evaluations": kb.evaluations}
    return _scan("k_lower", times, one, threads=1)


# ---------------------------------------------------------------------------
# aggregation

@dataclass
class CriteriaReport:
    psi: dict
    necessary: dict
    sufficient: dict
    operator: dict
    verdict: str
    certificates: list
    status: dict
    tables: dict = field(default_factory=dict, repr=False)

    @property
    def exit_code(self) -> int:
        return {"member": 0, "inconclusive": 1, "non-member": 2}[self.verdict]

    def to_json(self) -> str:
        d = {"psi": self.psi, "necessary": self.necessary, "sufficient": self.sufficient,
             "operator": self.operator, "verdict": self.verdict, "certificates": self.certificates,
             "status": self.status}
        return json.dumps(_clean(d), indent=2, sort_keys=True)


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if np.isfinite(v) else repr(v)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _guard(status: dict, name: str, fn):
    try:
        out = fn()
        status[name] = "ok"
        return out
    except BPKError as exc:
        status[name] = f"error:{exc.kind}:{exc}"
        return None


def _scan_dict(s: Scan | None):
    if s is None:
        return None
    return {"rows": [list(r) for r in s.rows], "bounded": s.bounded,
            "rule": "smallest-decade max within 2x of scan median (limsup proxy)"}


def full_report(psi, config: dict | None = None) -> CriteriaReport:
    """Run every test configured in ``config`` and compose the verdict.

    ``member`` needs both necessary tests to pass and at least one sufficient
    scan to be bounded; ``non-member`` needs a necessary failure with a
    certificate; anything else is ``inconclusive``.
    """
    from .serialize import psi_to_dict

    cfg = dict(config or {})
    status: dict = {}
    times = op.t_grid(cfg.get("t_scan"))
    grid = _grid_from(cfg.get("grid"))
    threads = cfg.get("threads")
    betas = cfg.get("betas", DEFAULT_BETAS)
    n_arc = int(cfg.get("n_arc", 721))

    sector = _guard(status, "sector", lambda: sector_test(psi, betas, n_arc=n_arc))
    growth = _guard(status, "growth", lambda: growth_fit(psi, cfg.get("radii"), n_arc=n_arc))
    certs = []
    for rep in (sector, growth):
        if rep is not None:
            certs += [asdict(c) for c in rep.certificates]
    necessary_failed = bool(certs)
    necessary_passed = sector is not None and growth is not None and sector.passed and growth.passed

    scans = {}
    if isinstance(psi, bc.BernsteinFunction) and psi.is_T0:
        scans["jt"] = _guard(status, "jt", lambda: jt_scan(psi, times, grid, threads))
        scans["kfmu"] = _guard(status, "kfmu", lambda: sufficient2_scan(
            psi, times, grid, atom_tol=float(cfg.get("atom_tol", 1e-6)), threads=threads))
        if scans["jt"] is not None:
            scans["derivative_tv"] = _derivative_from_jt(scans["jt"])
            status["derivative_tv"] = "ok"
        else:
            scans["derivative_tv"] = _guard(status, "derivative_tv",
                                            lambda: derivative_norm_scan(psi, times, grid, threads))
        kc = cfg.get("k_lower")
        if kc:
            scans["k_lower"] = _guard(status, "k_lower", lambda: k_lower_scan(
                psi, op.t_grid(kc.get("t_scan"), (0.1, 1.0, 4, True)), int(kc.get("budget", 16)),
                int(cfg.get("seed", 0)), int(kc.get("max_terms", 8)), grid))
    else:
        status["sufficient"] = "skipped: psi is not a T0 Bernstein function"

    operator = {}
    for spec in cfg.get("tuples", []):
        name = spec.get("name", spec.get("kind", "tuple"))
        def run(spec=spec):
            A = op.builtin_tuple(spec)
            ys = op.yosida_scan(psi, A, op.t_grid(spec.get("t_scan"), (1e-2, 1.0, 5, True)))
            return {"rows": ys.rows, "max": ys.max_value, "slope": ys.slope, "bounded": ys.bounded, "M": A.M}
        operator[name] = _guard(status, f"yosida:{name}", run)

    sufficient_ok = any(s is not None and s.bounded for k, s in scans.items() if k in ("jt", "kfmu"))
    if necessary_failed:
        verdict = "non-member"
    elif necessary_passed and sufficient_ok:
        verdict = "member"
    else:
        verdict = "inconclusive"

    necessary = {
        "sector": None if sector is None else {k: v for k, v in asdict(sector).items() if k != "certificates"}
        | {"passed": sector.passed},
        "growth": None if growth is None else {k: v for k, v in asdict(growth).items() if k != "certificates"}
        | {"passed": growth.passed},
    }
    try:
        desc = psi_to_dict(psi)
    except BPKError:
        desc = {"label": getattr(psi, "label", "")}
    tables = {k: s.csv() for k, s in scans.items() if s is not None}
    return CriteriaReport(desc, necessary, {k: _scan_dict(s) for k, s in scans.items()}, operator,
                          verdict, certs, status, tables)


def _grid_from(g: dict | None) -> sb.GridSpec | None:
    if not g:
        return None
    U = g.get("U")
    return sb.GridSpec(N=g.get("N"), U=None if U in (None, "auto") else float(U),
                       leak_tol=g.get("leak_tol"), clip_tol=float(g.get("clip_tol", 1e-4)),
                       tail_tol=float(g.get("tail_tol", 1e-7)))
