"""Subordination measures nu_t, their time derivatives, and the b_t functional.

``nu_t`` is the sub-probability measure on the orthant with
``int exp(z.u) dnu_t(u) = exp(t psi(z))``.  It is recovered on a uniform grid
from its distribution function: the Laplace transform of the distribution
function is ``exp(t psi(-p)) / prod(p)``, which is inverted by a damped Fourier
series (abscissa ``sigma``, smooth spectral filter, guard cells on the
negative side).  Cell masses are differences of the distribution function, so
they are exact up to the inversion error even where the density is singular.

Measures supported on a ray ``{r a}`` (every one-variable measure, and the
stable/gamma/tempered laws along a direction) are inverted in the radial
variable only.  Purely atomic Lévy measures on a lattice give lattice-supported
``nu_t``; those are inverted by a damped DFT of the point masses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from . import bernstein as bc
from . import quadrature as rq
from .errors import (ConcentrationError, IntegrabilityError, InversionQualityError,
                     ParameterError, PreconditionError, ResolutionError, ShapeError,
                     WindowError)

# damping sigma times period length; the damping is undone by exp(sigma u)
# on every axis, so the budget is split to keep the amplification ~ e^20
SIGMA_L = {1: 25.0, 2: 12.5, 3: 8.5}
OVERSAMPLE = {1: 32, 2: 8, 3: 4}
DEFAULT_N = {1: 2 ** 14, 2: 128, 3: 32}
LEAK_TOL = {1: 1e-6, 2: 1e-4, 3: 1e-3}
HEAVY_DIV = 512.0


def kappa(y):
    """``(exp(y) - 1) / y``: cell average of ``exp`` for a uniform cell density."""
    y = np.asarray(y, dtype=complex)
    out = np.ones_like(y)
    small = np.abs(y) < 1e-5
    big = ~small
    out[big] = np.expm1(y[big]) / y[big]
    ys = y[small]
    out[small] = 1.0 + ys / 2.0 + ys * ys / 6.0
    return out


@dataclass(frozen=True)
class GridSpec:
    """Grid for one inversion; ``U=None`` selects the window automatically."""

    N: int | None = None
    U: float | None = None
    leak_tol: float | None = None
    clip_tol: float = 1e-4
    tail_tol: float = 1e-7
    max_defect: float | None = None
    method: str = "auto"

    def leak(self, dim: int) -> float:
        # tensor-product inversions oversample less, so their guard cells ring more
        return LEAK_TOL.get(dim, 1e-3) if self.leak_tol is None else self.leak_tol

    def points(self, dim: int) -> int:
        N = DEFAULT_N.get(dim, 16) if self.N is None else int(self.N)
        if N < 8 or N & (N - 1):
            raise ParameterError(f"points per axis must be a power of two >= 8, got {N}")
        return N


@dataclass(frozen=True, eq=False)
class GridMeasure:
    """Measure on ``[0, U]^dim`` held as cell masses plus an exact origin atom.

    In ``cell`` mode ``weights[k]`` is the mass of the cell ``[k h, (k+1) h)``
    (per axis), spread uniformly.  In ``lattice`` mode it is a point mass at
    ``k h``.  ``atom0`` is the point mass at the origin, kept out of
    ``weights``.  If ``direction`` is set the grid is radial: the measure is
    the image of the stored one under ``r -> r a``.
    """

    n: int
    U: float
    h: float
    weights: np.ndarray
    defect: float = 0.0
    atom0: float = 0.0
    direction: np.ndarray | None = None
    mode: str = "cell"
    t: float | None = None
    clipped: float = 0.0
    leakage: float = 0.0
    cell0_exponent: float | None = None

    @property
    def dim(self) -> int:
        return self.weights.ndim

    @property
    def N(self) -> int:
        return self.weights.shape[0]

    @property
    def mass(self) -> float:
        return float(self.weights.sum().real + self.atom0)

    def nodes(self) -> np.ndarray:
        return np.arange(self.N) * self.h

    def compatible(self, other: "GridMeasure") -> bool:
        if self.weights.shape != other.weights.shape or self.mode != other.mode:
            return False
        if not np.isclose(self.h, other.h, rtol=1e-12, atol=0):
            return False
        da, db = self.direction, other.direction
        if (da is None) != (db is None):
            return False
        return da is None or np.allclose(da, db, rtol=1e-12, atol=0)

    def to_dict(self) -> dict:
        return {"n": self.n, "U": self.U, "h": self.h, "shape": list(self.weights.shape),
                "weights": self.weights.ravel().tolist(), "defect": self.defect,
                "atom0": self.atom0, "mode": self.mode, "t": self.t,
                "direction": None if self.direction is None else self.direction.tolist(),
                "clipped": self.clipped, "leakage": self.leakage, "signed": False}

    @classmethod
    def from_dict(cls, d: dict) -> "GridMeasure":
        w = np.asarray(d["weights"], float).reshape(d["shape"])
        a = d.get("direction")
        return cls(int(d["n"]), float(d["U"]), float(d["h"]), w, float(d["defect"]),
                   float(d.get("atom0", 0.0)), None if a is None else np.asarray(a, float),
                   d.get("mode", "cell"), d.get("t"), float(d.get("clipped", 0.0)),
                   float(d.get("leakage", 0.0)))


@dataclass(frozen=True, eq=False)
class SignedGridMeasure(GridMeasure):
    """Signed grid measure; ``defect`` is the signed mass beyond the window."""

    @property
    def tv_mass(self) -> float:
        return float(np.abs(self.weights).sum() + abs(self.atom0))

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["signed"] = True
        d["tv_mass"] = self.tv_mass
        return d


def measure_from_dict(d: dict) -> GridMeasure:
    if d.get("signed"):
        base = GridMeasure.from_dict(d)
        return SignedGridMeasure(**{f: getattr(base, f) for f in base.__dataclass_fields__})
    return GridMeasure.from_dict(d)


def dumps(m: GridMeasure) -> str:
    return json.dumps(m.to_dict())


# ---------------------------------------------------------------------------
# evaluation helpers

def _require_T0(psi) -> None:
    if not getattr(psi, "is_T0", False):
        raise PreconditionError("subordination needs psi in the class with c0 = 0 and c1 = 0")


def _ray(psi) -> np.ndarray | None:
    return psi.measure.direction()


def _symbol(psi, method: str) -> tuple[Callable[[np.ndarray], np.ndarray], int, np.ndarray | None]:
    """Return ``(f, dim, a)`` where ``f`` evaluates psi in the inversion variable."""
    a = _ray(psi)
    if a is not None:
        return (lambda x: psi.measure.radial(x, method)), 1, a
    return (lambda z: bc._dispatch(psi.measure, z, method)), psi.n, None


def origin_atom(psi, t: float) -> float:
    """``nu_t({0}) = exp(-t mu(orthant))``, zero for infinite Lévy measures."""
    m = psi.measure.total_mass()
    return float(np.exp(-t * m)) if np.isfinite(m) else 0.0


def scale(psi, t: float, method: str = "auto") -> float:
    """Length ``s*`` at which ``-t psi(-1/s*)`` reaches one (or half its supremum)."""
    f, dim, _ = _symbol(psi, method)
    one = np.ones(dim)
    sup = t * psi.measure.total_mass()
    target = min(1.0, 0.5 * sup)
    if target <= 0:
        raise ParameterError("scale undefined for t = 0 or a zero measure")

    def g(ls):
        x = -np.exp(-ls)
        val = f(np.array([x]) if dim == 1 else (x * one)[None, :])
        return float(-t * np.real(val[0]) - target)

    lo, hi = -40.0, 40.0
    while g(lo) < 0 and lo > -400:
        lo -= 40.0
    while g(hi) > 0 and hi < 400:
        hi += 40.0
    if g(lo) < 0 or g(hi) > 0:
        raise ResolutionError(f"nu_t at t={t:g} lives on scales outside double precision")
    return float(np.exp(optimize.brentq(g, lo, hi, xtol=1e-10)))


# ---------------------------------------------------------------------------
# inversion

@dataclass(frozen=True)
class _Layout:
    N: int
    U: float
    R: int
    dim: int = 1

    @property
    def h(self):
        return self.U / self.N

    @property
    def G(self):
        return self.N // 8

    @property
    def P(self):
        return self.N + 2 * self.G

    @property
    def L(self):
        return self.P * self.h

    @property
    def sigma(self):
        return SIGMA_L[self.dim] / self.L

    @property
    def J(self):
        return self.R * self.P


def _fold(values: np.ndarray, lay: _Layout, dim: int) -> np.ndarray:
    # frequencies run over j = -J/2 .. J/2-1; since J/2 is a multiple of P, the
    # position inside each length-P block is j mod P
    shape = []
    for _ in range(dim):
        shape += [lay.R, lay.P]
    v = values.reshape(shape)
    return v.sum(axis=tuple(range(0, 2 * dim, 2)))


def _spectrum_1d(phi, lay: _Layout) -> np.ndarray:
    J = lay.J
    jpos = np.arange(0, J // 2 + 1)
    p = lay.sigma + 2j * np.pi * jpos / lay.L
    eta = jpos / (J / 2)
    vals = phi(p) * np.exp(-36.0 * eta ** 8)
    # values at -j are conjugates (psi is real on the real axis)
    return np.concatenate([np.conj(vals[J // 2:0:-1]), vals[:J // 2]])


def _spectrum_nd(phi, lay: _Layout, dim: int) -> np.ndarray:
    J = lay.J
    j = np.arange(-J // 2, J // 2)
    p1 = lay.sigma + 2j * np.pi * j / lay.L
    filt = np.exp(-36.0 * (j / (J / 2)) ** 8)
    mesh = np.meshgrid(*([p1] * dim), indexing="ij")
    p = np.stack([m.ravel() for m in mesh], axis=1)
    f = filt
    for _ in range(dim - 1):
        f = np.multiply.outer(f, filt)
    return (phi(p) * f.ravel()).reshape((J,) * dim)


def _invert_cdf(phi, lay: _Layout, dim: int) -> np.ndarray:
    """Distribution-function values at ``k h`` for ``k = -G..N`` on every axis."""
    spec = _spectrum_1d(phi, lay) if dim == 1 else _spectrum_nd(phi, lay, dim)
    A = _fold(spec, lay, dim)
    S = np.fft.ifftn(A) * lay.P ** dim
    k = np.arange(-lay.G, lay.N + 1)
    S = S[np.ix_(*([k % lay.P] * dim))]
    damp = np.exp(lay.sigma * k * lay.h)
    for ax in range(dim):
        shp = [1] * dim
        shp[ax] = -1
        S = S * damp.reshape(shp)
    return (S / lay.L ** dim).real


def _cell_masses(F: np.ndarray, G: int, alias: float) -> tuple[np.ndarray, float]:
    """Cell masses of the continuous part and the largest guard-cell value.

    The periodic image one period up reaches the guard cells damped by
    ``alias = exp(-sigma L)``; it is estimated from the far edge and removed
    before the leakage statistic is taken.
    """
    dim = F.ndim
    leakage = 0.0
    for ax in range(dim):
        guard = [slice(None)] * dim
        guard[ax] = slice(0, G)
        edge = [slice(None)] * dim
        edge[ax] = slice(-1, None)
        dev = F[tuple(guard)] - alias * F[tuple(edge)]
        if dev.size:
            leakage = max(leakage, float(np.abs(dev).max()))
    Fw = F[(slice(G, None),) * dim].copy()
    for ax in range(dim):
        idx = [slice(None)] * dim
        idx[ax] = 0
        Fw[tuple(idx)] = 0.0
    m = Fw
    for ax in range(dim):
        m = np.diff(m, axis=ax)
    return m, leakage


def _far_corner(F: np.ndarray) -> float:
    return float(F[(-1,) * F.ndim])


def _lattice_step(values: np.ndarray) -> float | None:
    v = values[values > 0]
    if v.size == 0:
        return None
    base = v.min()
    for q in range(1, 65):
        d = base / q
        r = v / d
        if np.all(np.abs(r - np.round(r)) <= 1e-9 * r.max()):
            return float(d)
    return None


def _lattice_info(psi) -> tuple[float, int] | None:
    """Lattice step of an atomic Lévy measure (radial or per axis), else None."""
    at = psi.measure.atoms()
    if at is None:
        return None
    loc, _ = at
    a = _ray(psi)
    if a is not None:
        r = loc.sum(axis=1) / a.sum()
        step = _lattice_step(r)
        return None if step is None else (step, 1)
    step = _lattice_step(loc.ravel())
    return None if step is None else (step, psi.n)


def _make_phi(f, t, dim, deriv, atom):
    # the origin atom is removed analytically: its distribution function jumps
    # on the boundary and would ring into the guard cells
    def phi(p):
        val = f(-p)
        e = np.exp(t * val)
        num = val * e if deriv else e
        den = p if dim == 1 else np.prod(p, axis=1)
        return (num - atom) / den
    return phi


def _invert(psi, t, spec: GridSpec, deriv: bool, U: float):
    f, dim, a = _symbol(psi, spec.method)
    N = spec.points(dim)
    lay = _Layout(N, float(U), OVERSAMPLE.get(dim, 2), dim)
    atom = origin_atom(psi, t)
    atom_val = -psi.measure.total_mass() * atom if deriv and atom > 0 else atom
    F = _invert_cdf(_make_phi(f, t, dim, deriv, atom_val), lay, dim)
    m, leak = _cell_masses(F, lay.G, np.exp(-SIGMA_L[dim]))
    return m, leak, atom_val, _far_corner(F) + atom_val, lay, a


def _auto_window(psi, t, spec: GridSpec, deriv: bool):
    f, dim, _ = _symbol(psi, spec.method)
    N = spec.points(dim)
    s = scale(psi, t, spec.method)
    # light tails: grow the window until the tail is below tail_tol (cell >= s*/16).
    # heavy tails never get there; then the cell is s*/512 and the far mass
    # is left to the tail model (see laplace).
    cap = s * N / 16.0
    heavy = s * N / HEAVY_DIV
    U = 8.0 * s
    fallback = None
    while True:
        out = _invert(psi, t, spec, deriv, U)
        Fend = out[3]
        tail = abs(1.0 - Fend) if not deriv else abs(Fend)
        if tail < spec.tail_tol:
            return out
        if U <= heavy * (1 + 1e-12):
            fallback = out
        if U * 2 > cap:
            return fallback if fallback is not None else out
        U *= 2.0


def _cell0_exponent(m: np.ndarray) -> float | None:
    if m.ndim != 1 or m.shape[0] < 2 or m[0] <= 0:
        return None
    beta = np.log2((m[0] + m[1]) / m[0])
    return float(np.clip(beta, 1e-3, 10.0)) if np.isfinite(beta) else None


def _nonnegative(m: np.ndarray) -> np.ndarray:
    """Remove negative inversion noise.

    In 1-d the distribution function is replaced by the mean of its upper and
    lower monotone envelopes, which keeps the total mass to within the noise
    amplitude; zeroing negative cells instead would bias the mass upward by
    the summed noise.
    """
    if m.ndim != 1:
        return np.where(m < 0, 0.0, m)
    F = np.cumsum(m)
    Fm = 0.5 * (np.maximum.accumulate(F) + np.minimum.accumulate(F[::-1])[::-1])
    Fm = np.maximum.accumulate(np.maximum(Fm, 0.0))
    return np.diff(Fm, prepend=0.0)


def compute_nu(psi, t: float, grid: GridSpec | None = None) -> GridMeasure:
    """Grid version of ``nu_t``; ``t = 0`` gives the unit atom at the origin."""
    spec = grid or GridSpec()
    _require_T0(psi)
    if t < 0:
        raise ParameterError("t must be nonnegative")
    lat = _lattice_info(psi)
    a = _ray(psi)
    dim = 1 if a is not None else psi.n
    if t == 0:
        N = spec.points(dim)
        U = spec.U or (N * lat[0] if lat else 1.0)
        return GridMeasure(psi.n, U, U / N, np.zeros((N,) * dim), 0.0, 1.0, a, "lattice" if lat else "cell", 0.0)
    if lat is not None:
        return _lattice_nu(psi, t, spec, lat, deriv=False)
    if spec.U is None:
        m, leak, atom, Fend, lay, a = _auto_window(psi, t, spec, False)
    else:
        m, leak, atom, Fend, lay, a = _invert(psi, t, spec, False, spec.U)
    neg = m < 0
    clipped = float(-m[neg].sum())
    total = float(m.sum() + atom)
    tol = spec.leak(m.ndim)
    if leak > tol:
        raise InversionQualityError(f"negative-orthant leakage {leak:.3g} exceeds {tol:g}")
    if clipped > spec.clip_tol * max(total, 1e-300):
        raise InversionQualityError(f"clipped negative mass {clipped:.3g} exceeds {spec.clip_tol:g} of total")
    w = _nonnegative(m)
    defect = max(0.0, 1.0 - float(w.sum()) - atom)
    if spec.max_defect is not None and defect > spec.max_defect:
        raise WindowError(f"mass {defect:.3g} beyond U={lay.U:g} exceeds {spec.max_defect:g}",
                          suggested_U=2.0 * lay.U)
    return GridMeasure(psi.n, lay.U, lay.h, w, defect, atom, a, "cell", float(t), clipped, leak,
                       _cell0_exponent(w))


def compute_nu_derivative(psi, t: float, grid: GridSpec | None = None) -> SignedGridMeasure:
    """Grid version of ``d nu_t / dt``, whose Laplace transform is ``psi exp(t psi)``."""
    spec = grid or GridSpec()
    _require_T0(psi)
    if t <= 0:
        raise ParameterError("the derivative needs t > 0")
    lat = _lattice_info(psi)
    if lat is not None:
        return _lattice_nu(psi, t, spec, lat, deriv=True)
    if spec.U is None:
        m, leak, atom, Fend, lay, a = _auto_window(psi, t, spec, True)
    else:
        m, leak, atom, Fend, lay, a = _invert(psi, t, spec, True, spec.U)
    if not np.all(np.isfinite(m)):
        raise IntegrabilityError("psi exp(t psi) is not integrable at this resolution")
    tv = float(np.abs(m).sum() + abs(atom))
    tol = spec.leak(m.ndim)
    if leak > tol * max(tv, 1.0):
        raise ConcentrationError(
            f"derivative leaks {leak:.3g} onto the negative orthant (threshold {tol:g} of TV)")
    tail = -float(m.sum() + atom)
    return SignedGridMeasure(psi.n, lay.U, lay.h, m, tail, atom, a, "cell", float(t), 0.0, leak)


def _lattice_nu(psi, t, spec: GridSpec, lat, deriv: bool):
    step, dim = lat
    f, fdim, a = _symbol(psi, spec.method)
    N = spec.points(dim)
    h = step
    if spec.U is not None:
        h = spec.U / N
        r = step / h
        if abs(r - round(r)) > 1e-9 * max(r, 1.0):
            raise ParameterError("explicit window must put the atom lattice on grid nodes")
    P = 2 * N
    sig = 30.0 / (P * h)
    j = np.arange(P)
    x1 = -sig + 2j * np.pi * j / (P * h)
    if dim == 1:
        z = x1
    else:
        mesh = np.meshgrid(*([x1] * dim), indexing="ij")
        z = np.stack([m.ravel() for m in mesh], axis=1)
    val = f(z)
    e = np.exp(t * val)
    spec_vals = (val * e if deriv else e).reshape((P,) * dim)
    q = np.fft.ifftn(np.conj(spec_vals)).conj().real  # a_m e^{-sig m h}
    k = np.arange(P)
    for ax in range(dim):
        shp = [1] * dim
        shp[ax] = -1
        q = q * np.exp(sig * k * h).reshape(shp)
    inside = q[(slice(0, N),) * dim].copy()
    outside = float(q.sum() - inside.sum())
    atom = float(inside[(0,) * dim])
    inside[(0,) * dim] = 0.0
    U = N * h
    if deriv:
        return SignedGridMeasure(psi.n, U, h, inside, -float(inside.sum() + atom), atom, a,
                                 "lattice", float(t), 0.0, abs(outside))
    neg = inside < 0
    clipped = float(-inside[neg].sum())
    w = _nonnegative(inside)
    defect = max(0.0, 1.0 - float(w.sum()) - atom)
    if spec.max_defect is not None and defect > spec.max_defect:
        raise WindowError(f"mass {defect:.3g} beyond U={U:g}", suggested_U=2.0 * U)
    return GridMeasure(psi.n, U, h, w, defect, atom, a, "lattice", float(t), clipped, abs(outside))


@dataclass(frozen=True, eq=False)
class CompositeMeasure:
    """``nu_t`` assembled from nested windows ``U_l = U_0 ratio^l``.

    Level ``l`` contributes only its cells ``k >= start[l]``, the annulus not
    covered by the finer level below it.
    """

    levels: tuple
    starts: tuple
    defect: float
    t: float

    @property
    def U(self) -> float:
        return self.levels[-1].U


def compute_nu_levels(psi, t: float, N: int = 2 ** 14, ratio: int = 16,
                      stop: Callable[[float, float], bool] | None = None,
                      max_levels: int = 16, method: str = "auto",
                      U0: float | None = None) -> CompositeMeasure:
    """Multi-window ``nu_t`` for quadratures that need a long reach and a fine origin."""
    _require_T0(psi)
    if psi.measure.direction() is None:
        raise ParameterError("nested windows are implemented for ray-supported measures only")
    if _lattice_info(psi) is not None:
        m = compute_nu(psi, t, GridSpec(N=N, method=method))
        return CompositeMeasure((m,), (0,), m.defect, t)
    if U0 is None:
        U0 = 8.0 * scale(psi, t, method)
    stop = stop or (lambda U, d: d < 1e-10)
    levels, starts = [], []
    for lev in range(max_levels):
        U = U0 * ratio ** lev
        m = compute_nu(psi, t, GridSpec(N=N, U=U, method=method, leak_tol=np.inf, clip_tol=np.inf))
        levels.append(m)
        starts.append(0 if lev == 0 else N // ratio)
        if stop(U, m.defect):
            break
    return CompositeMeasure(tuple(levels), tuple(starts), levels[-1].defect, t)


# ---------------------------------------------------------------------------
# measure algebra

def slope_kernel(y):
    """``int_0^1 exp(y v) (v - 1/2) dv``, weight of a linear in-cell density tilt."""
    y = np.asarray(y, dtype=complex)
    out = np.empty_like(y)
    small = np.abs(y) < 0.05
    ys = y[small]
    acc = np.zeros_like(ys)
    term = np.ones_like(ys)
    for n in range(1, 9):
        term = term * ys / n
        acc = acc + term * n / (2.0 * (n + 1) * (n + 2))
    out[small] = acc
    yb = y[~small]
    e = np.exp(yb)
    out[~small] = e / yb - np.expm1(yb) / yb ** 2 - 0.5 * np.expm1(yb) / yb
    return out


def slopes(w: np.ndarray) -> np.ndarray:
    """Central-difference mass tilt per cell (one-sided at the far end, zero in cell 0)."""
    d = np.zeros_like(w)
    if w.shape[0] > 2:
        d[1:-1] = 0.5 * (w[2:] - w[:-2])
        d[-1] = w[-1] - w[-2]
    return d


def cell0_factor(y, beta: float | None, order: int = 64) -> np.ndarray:
    """Average of ``exp(y v)`` over the first cell (``v`` in cell units).

    With a power-law distribution function ``F(v) ~ v^beta`` on the cell the
    substitution ``v = w^(1/beta)`` makes the weight uniform in ``w``.
    """
    y = np.asarray(y, dtype=complex)
    if beta is None:
        return kappa(y)
    gx, gw = np.polynomial.legendre.leggauss(order)
    w = 0.5 * (gx + 1.0)
    v = w ** (1.0 / beta)
    return np.exp(np.multiply.outer(y, v)) @ (0.5 * gw)


def stable_tail_series(t: float, alpha: float, C: float,
                       terms: int = 80) -> list[tuple[float, float, float]]:
    """Terms ``(b_k, k alpha, |b_k| bound)`` of the density of ``nu_t`` for a
    stable law, ``sum_k b_k u^(-1 - k alpha)``; converges for every ``u > 0``."""
    from scipy import special
    c = -C * special.gamma(-alpha)
    out = []
    for k in range(1, terms + 1):
        env = np.exp(k * np.log(t * c) + special.gammaln(k * alpha + 1) - special.gammaln(k + 1)) / np.pi
        out.append(((-1) ** (k + 1) * env * np.sin(k * np.pi * alpha), k * alpha, env))
    return out


def _levy_tail(m: GridMeasure, x: np.ndarray, psi) -> np.ndarray:
    law = getattr(psi, "measure", None)
    if not isinstance(law, bc.RayLaw) or m.direction is None:
        raise ParameterError("the Lévy tail model needs a ray-supported closed-form measure")
    if law.lam == 0 and m.t:
        # exact: integrate the density series of nu_t beyond the window
        acc = np.zeros(x.shape, complex)
        signed = isinstance(m, SignedGridMeasure)
        for k, (b, p, env) in enumerate(stable_tail_series(m.t, law.alpha, law.C), start=1):
            if signed:
                b, env = b * k / m.t, env * k / m.t        # d/dt of the t^k coefficient
            acc += b * rq.far_transform(x, m.U, p, 0.0, 1.0)
            # |far_transform| <= U^-p / p
            if env * m.U ** -p / p <= 1e-17 * max(float(np.abs(acc).max()), 1e-300):
                break
        return acc
    total = rq.far_mass(m.U, law.alpha, law.lam, law.C)
    if not 0 < total < np.inf:
        return m.defect * np.exp(x * m.U)
    return m.defect * rq.far_transform(x, m.U, law.alpha, law.lam, law.C) / total


def laplace(m: GridMeasure, z, tail: str = "none", psi=None) -> np.ndarray:
    """``int exp(z.u) dm(u)`` for points ``z`` of shape ``(M, n)``.

    ``tail="edge"`` adds the mass beyond the window as a point mass at the
    window edge, a proxy that is exact at ``z = 0``.  ``tail="levy"`` spreads
    it with the shape of the Lévy density of ``psi`` beyond the window, which
    is how the tail of a heavy-tailed subordinator decays.
    """
    if tail not in ("none", "edge", "levy"):
        raise ParameterError(f"unknown tail model {tail!r}")
    z = bc._as_points(z, m.n).reshape(-1, m.n)
    cell = m.mode == "cell"
    edge = 0.0
    if m.direction is not None:
        x = z @ m.direction
        k = m.nodes()
        d = slopes(m.weights) if cell else None
        out = np.empty(x.shape, complex)
        for s in range(0, x.size, 64):
            xs = x[s:s + 64]
            e = np.exp(np.outer(xs, k))
            if cell:
                y = xs * m.h
                val = (e @ m.weights) * kappa(y) + (e @ d) * slope_kernel(y)
                val += m.weights[0] * (cell0_factor(y, m.cell0_exponent) - kappa(y))
                out[s:s + 64] = val
            else:
                out[s:s + 64] = e @ m.weights
        if tail == "edge":
            edge = m.defect * np.exp(x * m.U)
        elif tail == "levy" and m.defect > 0:
            edge = _levy_tail(m, x, psi)
        return out + m.atom0 + edge
    out = np.empty(z.shape[0], complex)
    k = m.nodes()
    tilts = [np.apply_along_axis(slopes, ax, m.weights) for ax in range(m.dim)] if cell else []

    def contract(arr, vecs):
        acc = arr.astype(complex)
        for ax in range(m.dim - 1, -1, -1):
            acc = acc @ vecs[ax]
        return acc

    for i, zi in enumerate(z):
        e = [np.exp(zi[ax] * k) for ax in range(m.dim)]
        if not cell:
            out[i] = contract(m.weights, e)
            continue
        y = zi * m.h
        base = [e[ax] * kappa(y[ax]) for ax in range(m.dim)]
        val = contract(m.weights, base)
        for ax in range(m.dim):
            vecs = list(base)
            vecs[ax] = e[ax] * slope_kernel(y[ax])
            val += contract(tilts[ax], vecs)
        out[i] = val
    if tail == "levy" and m.defect > 0:
        raise ParameterError("the Lévy tail model needs a ray-supported measure")
    if tail == "edge":
        edge = m.defect * np.exp(z.sum(axis=1) * m.U)
    return out + m.atom0 + edge


def _sym_fftconv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full linear convolution whose spectral product is written in real
    arithmetic, so swapping the arguments gives identical bits."""
    shape = [sa + sb - 1 for sa, sb in zip(a.shape, b.shape)]
    fshape = [int(2 ** np.ceil(np.log2(s))) for s in shape]
    axes = list(range(a.ndim))
    A = np.fft.rfftn(a, fshape, axes)
    B = np.fft.rfftn(b, fshape, axes)
    re = A.real * B.real - A.imag * B.imag
    im = A.real * B.imag + A.imag * B.real
    c = np.fft.irfftn(re + 1j * im, fshape, axes)
    return c[tuple(slice(0, s) for s in shape)]


def _cell_conv(a: np.ndarray, b: np.ndarray, cell: bool) -> np.ndarray:
    c = _sym_fftconv(a, b)
    if not cell:
        return c
    # the sum of two cell-uniform variables is a tent over two cells: half each
    for ax in range(c.ndim):
        shifted = np.zeros_like(c)
        sl_dst = [slice(None)] * c.ndim
        sl_src = [slice(None)] * c.ndim
        sl_dst[ax] = slice(1, None)
        sl_src[ax] = slice(0, -1)
        shifted[tuple(sl_dst)] = c[tuple(sl_src)]
        c = 0.5 * (c + shifted)
    return c


def convolve(a: GridMeasure, b: GridMeasure) -> GridMeasure:
    if a.n != b.n or not a.compatible(b):
        raise ShapeError("convolution needs identical grids")
    cell = a.mode == "cell"
    c = _cell_conv(a.weights, b.weights, cell)
    pad = [(0, s - n) for s, n in zip(c.shape, a.weights.shape)]
    # one commutative sum keeps a*b and b*a bit-identical
    c = c + (a.atom0 * np.pad(b.weights, pad) + b.atom0 * np.pad(a.weights, pad))
    inside = c[(slice(0, a.N),) * a.dim]
    inside = np.where(np.abs(inside) < 1e-300, 0.0, inside)
    if not isinstance(a, SignedGridMeasure) and not isinstance(b, SignedGridMeasure):
        inside = np.maximum(inside, 0.0)
    atom = a.atom0 * b.atom0
    full = (a.mass + a.defect) * (b.mass + b.defect)
    defect = max(0.0, full - float(inside.sum()) - atom)
    cls = SignedGridMeasure if isinstance(a, SignedGridMeasure) or isinstance(b, SignedGridMeasure) else GridMeasure
    t = None if a.t is None or b.t is None else a.t + b.t
    return cls(a.n, a.U, a.h, inside, defect, atom, a.direction, a.mode, t)


def tv_norm(m: GridMeasure) -> float:
    """Total variation inside the window (``defect`` is reported separately)."""
    return float(np.abs(m.weights).sum() + abs(m.atom0))


def tv_distance(a: GridMeasure, b: GridMeasure) -> float:
    if not a.compatible(b):
        raise ShapeError("TV distance needs identical grids")
    return float(np.abs(a.weights - b.weights).sum() + abs(a.atom0 - b.atom0))


def as_signed(m: GridMeasure) -> SignedGridMeasure:
    return SignedGridMeasure(**{f: getattr(m, f) for f in m.__dataclass_fields__})


# ---------------------------------------------------------------------------
# exponential polynomials

@dataclass(frozen=True, eq=False)
class ExponentialPolynomial:
    """``p(r) = sum_j c_j exp(s_j . r)`` on the closed orthant."""

    coefs: np.ndarray
    exps: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefs, dtype=complex))
        s = np.asarray(self.exps, dtype=complex)
        if s.ndim == 1:
            s = s[:, None] if c.size == s.size else s[None, :]
        if s.size == 0:
            s = s.reshape(0, max(1, s.shape[-1] if s.ndim == 2 else 1))
        if s.shape[0] != c.shape[0]:
            raise ParameterError("coefficient and exponent lists differ in length")
        if np.any(s.real >= 0):
            raise ParameterError("exponents must have negative real parts")
        object.__setattr__(self, "coefs", c)
        object.__setattr__(self, "exps", s)

    @property
    def n(self) -> int:
        return self.exps.shape[1]

    def __len__(self):
        return self.coefs.shape[0]

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.n == 1 and (r.ndim == 0 or r.shape[-1] != 1):
            r = r[..., None]
        return np.exp(r @ self.exps.T) @ self.coefs

    def scaled(self, k: complex) -> "ExponentialPolynomial":
        return ExponentialPolynomial(k * self.coefs, self.exps)

    @cached_property
    def sup(self) -> float:
        return sup_norm(self)


@dataclass(frozen=True)
class SupNorm:
    value: float
    gap: float
    argmax: list


def sup_norm_report(p: ExponentialPolynomial, points: int | None = None,
                    levels: int = 3) -> SupNorm:
    """Coarse scan of ``|p|`` then three rounds of 4x refinement around the best points."""
    if len(p) == 0:
        return SupNorm(0.0, 0.0, [0.0] * p.n)
    n = p.n
    decay = np.abs(p.exps.real).min()
    fast = np.abs(p.exps).max()
    reach = 40.0 / decay
    if points is None:
        points = {1: 600, 2: 80}.get(n, 24)
    axis = np.concatenate([[0.0], np.geomspace(1e-3 / fast, reach, points - 1)])
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    vals = np.abs(p(pts))
    order = np.argsort(-vals, kind="stable")[:5]
    best_val = float(vals[order[0]])
    best_pt = pts[order[0]]
    spacing = np.diff(axis)
    lip = float(np.sum(np.abs(p.coefs) * np.linalg.norm(p.exps, axis=1)))
    final_step = 0.0
    for idx in order:
        centre = pts[idx].copy()
        step = np.array([_local_step(axis, spacing, c) for c in centre])
        for _ in range(levels):
            step = step / 4.0
            offs = np.arange(-4, 5)
            local = np.meshgrid(*[np.maximum(c + offs * st, 0.0) for c, st in zip(centre, step)], indexing="ij")
            lp = np.stack([m.ravel() for m in local], axis=1)
            lv = np.abs(p(lp))
            i = int(np.argmax(lv))
            centre = lp[i]
            if lv[i] > best_val:
                best_val, best_pt = float(lv[i]), centre.copy()
        final_step = max(final_step, float(step.max()))
    gap = lip * final_step * np.sqrt(n)
    return SupNorm(best_val, gap, best_pt.tolist())


def _local_step(axis, spacing, c):
    i = int(np.clip(np.searchsorted(axis, c), 1, len(axis) - 1))
    return float(spacing[i - 1])


def sup_norm(p: ExponentialPolynomial) -> float:
    return sup_norm_report(p).value


# ---------------------------------------------------------------------------
# b_t

def bt_closed_form(psi, t: float, p: ExponentialPolynomial, method: str = "auto") -> complex:
    """``sum_j c_j exp(t psi(s_j)) psi(s_j)``."""
    if len(p) == 0:
        return 0j
    v = np.atleast_1d(bc.eval_complex(psi, p.exps, method=method))
    return complex(np.sum(p.coefs * np.exp(t * v) * v))


def tail_model(psi, m: GridMeasure) -> str:
    """Best available model for the mass of ``m`` beyond its window."""
    law = getattr(psi, "measure", None)
    if psi is not None and isinstance(law, bc.RayLaw) and m.direction is not None:
        return "levy"
    return "none"


def nu_pairing(nu: GridMeasure, p: ExponentialPolynomial, psi=None) -> complex:
    """``int p dnu``; with ``psi`` given the part beyond the window is modelled."""
    if len(p) == 0:
        return 0j
    return complex(laplace(nu, p.exps, tail_model(psi, nu), psi) @ p.coefs)


def bt_double_integral(psi, nu: GridMeasure, p: ExponentialPolynomial,
                       eps: float | None = None) -> complex:
    """``int int p(r) d_r(nu_t(r - u) - nu_t(r)) dmu(u)`` with Lévy-measure nodes.

    For each node ``u`` the shifted-minus-unshifted measure is paired with
    ``p``; since ``p`` is an exponential sum the pairing of the shift by ``u``
    is ``sum_j c_j exp(s_j.u) nu(e_j)``.  Mass of ``mu`` closer to the origin
    than ``eps`` enters through its first moment, mass beyond the reach of
    ``p`` through ``-mu(far) nu(p)``.
    """
    if len(p) == 0:
        return 0j
    if p.n != psi.n:
        raise ShapeError("polynomial and psi dimensions differ")
    s = p.exps
    L = laplace(nu, s, tail_model(psi, nu), psi)      # nu(e_j)
    decay = float(np.min(np.abs(s.real.sum(axis=1) if psi.n > 1 else s.real[:, 0])))
    W = 60.0 / max(decay, 1e-300)
    if psi.n > 1:
        W = 60.0 / float(np.min(np.abs(s.real).max(axis=1)))
    if eps is None:
        eps = 1e-6 * min(nu.h, 1.0 / float(np.abs(s).max()))
    nodes = psi.measure.nodes(eps, W)
    if not np.all(np.isfinite(nodes.small_first)):
        raise ResolutionError("Lévy measure too singular at the origin for the grid step")
    shift = np.expm1(nodes.points.astype(complex) @ s.T)        # (K, J)
    per_term = nodes.weights @ shift + s @ nodes.small_first
    far = nodes.far_mass if np.isfinite(nodes.far_mass) else 0.0
    per_term = per_term - far
    return complex(np.sum(p.coefs * per_term * L))


@dataclass(frozen=True)
class KLowerBound:
    value: float
    polynomial: ExponentialPolynomial
    evaluations: int
    label: str = "certified lower bound"


def _random_poly(rng, n, m, lo, hi):
    mags = np.exp(rng.uniform(np.log(lo), np.log(hi), size=(m, n)))
    c = rng.normal(size=m) + 1j * rng.normal(size=m)
    return ExponentialPolynomial(c, -mags)


def estimate_K(nu: GridMeasure, psi, budget: int = 64, seed: int = 0,
               max_terms: int = 8) -> KLowerBound:
    """Random search for ``sup |b_t(p)| / ||p||``; returns a lower bound of ``K(nu_t, mu)``."""
    if not 1 <= max_terms <= 8:
        raise ParameterError("term count is capped at 8")
    n = psi.n
    lo, hi = 0.5 / nu.U, 4.0 / nu.h
    seed_rate = 1.0 / np.sqrt(nu.U * nu.h)
    best_p = ExponentialPolynomial([1.0], -seed_rate * np.ones((1, n)))
    best = abs(bt_double_integral(psi, nu, best_p)) / sup_norm(best_p)
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        m = int(rng.integers(1, max_terms + 1))
        p = _random_poly(rng, n, m, lo, hi)
        sup = sup_norm(p)
        if sup <= 0:
            continue
        val = abs(bt_double_integral(psi, nu, p)) / sup
        if val > best:
            best, best_p = val, p
    return KLowerBound(float(best), best_p, budget + 1)


@dataclass(frozen=True)
class WeakContinuityReport:
    passed: bool
    t0: float
    times: list
    deviations: list
    tol: float


def weak_continuity_probe(psi, t0: float, tests: Sequence[ExponentialPolynomial],
                          steps: int = 40, tol: float = 1e-8,
                          method: str = "auto") -> WeakContinuityReport:
    """``max_p |nu_t(p) - nu_t0(p)|`` along ``t = t0 + 2^-k``."""
    _require_T0(psi)
    times = [t0 + 2.0 ** -k for k in range(1, steps + 1)]
    if not tests:
        return WeakContinuityReport(True, t0, times, [0.0] * len(times), tol)
    vals = [np.atleast_1d(bc.eval_complex(psi, p.exps, method=method)) for p in tests]

    def pair(t):
        return [complex(np.sum(p.coefs * np.exp(t * v))) for p, v in zip(tests, vals)]

    ref = pair(t0)
    dev = [max(abs(a - b) for a, b in zip(pair(t), ref)) for t in times]
    tail = dev[len(dev) // 2:]
    decreasing = all(b <= a * (1 + 1e-9) + 1e-15 for a, b in zip(tail, tail[1:]))
    return WeakContinuityReport(bool(dev[-1] < tol and decreasing), t0, times, dev, tol)


def scan_csv(rows: Sequence[tuple[float, float]], header: str = "t,t_times_tv") -> str:
    lines = [header] + [",".join(f"{v:.17g}" for v in r) for r in rows]
    return "\n".join(lines) + "\n"
