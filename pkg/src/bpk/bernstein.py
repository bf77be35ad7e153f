"""Nonpositive Bernstein functions of n variables and their Lévy triplets.

A function ``psi`` is stored as ``(c0, c1, mu)`` and evaluated through

    psi(z) = c0 + c1 . z + int (exp(z . u) - 1) dmu(u),    Re z_j <= 0.

Measures come in three variants: finitely many atoms, a density tabulated on a
uniform grid, and closed-form families (stable, gamma, tempered along a ray,
and the divided-difference construction on two variables).  Every variant
evaluates by quadrature; closed-form families also carry an exact evaluator
used as an oracle and as a fast path (``method="auto"``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special

from . import quadrature as rq
from .errors import DomainError, IntegrabilityError, ParameterError

METHODS = ("quadrature", "closed", "auto")


@dataclass(frozen=True)
class LevyNodes:
    """Discretization of a Lévy measure for double-integral work.

    ``points``/``weights`` cover the bulk; the part closer to the origin than
    the node range is summarized by its first moment ``small_first`` (the
    integrands used downstream vanish linearly there), and the part beyond the
    node range by ``far_mass`` (mass sent out of any bounded window).
    """

    points: np.ndarray
    weights: np.ndarray
    small_first: np.ndarray
    far_mass: float = 0.0

    @property
    def n(self) -> int:
        return self.points.shape[1]


def _as_points(z, n: int) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if n == 1 and (z.ndim == 0 or z.shape[-1] != 1):
        z = z[..., None]
    if z.shape[-1] != n:
        raise ParameterError(f"expected points with last axis {n}, got shape {z.shape}")
    return z


class LevyMeasure:
    variant = "abstract"
    n: int

    def integrate(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def closed(self, z: np.ndarray) -> np.ndarray | None:
        return None

    def total_mass(self) -> float:
        raise NotImplementedError

    def first_moment(self) -> np.ndarray:
        raise NotImplementedError

    def nodes(self, eps: float, W: float) -> LevyNodes:
        raise NotImplementedError

    def direction(self) -> np.ndarray | None:
        """Unit-free direction ``a`` if the measure lives on the ray ``{r a}``."""
        if self.n == 1:
            return np.ones(1)
        return None

    def radial(self, x: np.ndarray, method: str = "quadrature") -> np.ndarray:
        """Radial profile ``x -> int (exp(x r) - 1) dmu_r`` of a ray measure."""
        a = self.direction()
        if a is None:
            raise ParameterError("measure is not supported on a ray")
        z = np.asarray(x, dtype=complex)[..., None] / a.sum() * np.ones(self.n)
        return _dispatch(self, z, method)


    def atoms(self) -> tuple[np.ndarray, np.ndarray] | None:
        return None

    def payload(self) -> dict:
        raise NotImplementedError


def _dispatch(measure: LevyMeasure, z: np.ndarray, method: str) -> np.ndarray:
    if method not in METHODS:
        raise ParameterError(f"unknown evaluation method {method!r}")
    if method == "quadrature":
        return measure.integrate(z)
    val = measure.closed(z)
    if val is None:
        if method == "closed":
            raise ParameterError(f"{measure.variant} measure has no closed-form evaluator")
        return measure.integrate(z)
    return val


@dataclass(frozen=True, eq=False)
class Atoms(LevyMeasure):
    locations: np.ndarray
    weights: np.ndarray
    variant = "Atoms"

    def __post_init__(self):
        loc = np.atleast_2d(np.asarray(self.locations, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if loc.shape[0] != w.shape[0]:
            raise ParameterError("atom locations and weights differ in length")
        if np.any(w < 0):
            raise ParameterError("atom weights must be nonnegative")
        if np.any(loc < 0) or np.any(np.all(loc == 0, axis=1)):
            raise ParameterError("atoms must lie in the closed orthant minus the origin")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.locations.shape[1]

    def integrate(self, z):
        z = _as_points(z, self.n)
        phase = z @ self.locations.T
        return np.expm1(phase) @ self.weights

    closed = integrate

    def total_mass(self):
        return float(self.weights.sum())

    def first_moment(self):
        return self.weights @ self.locations

    def nodes(self, eps, W):
        return LevyNodes(self.locations, self.weights, np.zeros(self.n), 0.0)

    def atoms(self):
        return self.locations, self.weights

    def direction(self):
        if self.n == 1:
            return np.ones(1)
        d = self.locations / self.locations.sum(axis=1, keepdims=True)
        if np.allclose(d, d[0], rtol=0, atol=1e-14):
            return d[0]
        return None


    def payload(self):
        return {"locations": self.locations.tolist(), "weights": self.weights.tolist()}


@dataclass(frozen=True)
class TailDescriptor:
    """Density beyond the grid is bounded by ``b (|u|/U)^(-exponent) exp(-rate (|u| - U))``."""

    exponent: float
    rate: float


@dataclass(frozen=True, eq=False)
class GridDensity(LevyMeasure):
    """Density sampled at the nodes ``(k + 1) h``, ``k = 0..N-1`` of ``(0, U]^n``."""

    U: float
    h: float
    values: np.ndarray
    tail: TailDescriptor | None = None
    tail_tol: float = 1e-10
    variant = "GridDensity"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        N = int(round(self.U / self.h))
        if abs(N * self.h - self.U) > 1e-9 * self.U or any(s != N for s in vals.shape):
            raise ParameterError("grid density values must have shape (U/h,)*n")
        if np.any(vals < 0):
            raise ParameterError("density values must be nonnegative")
        object.__setattr__(self, "values", vals)
        self._check_tail()

    @property
    def n(self) -> int:
        return self.values.ndim

    def _boundary_max(self) -> float:
        v = self.values
        edges = [np.take(v, -1, axis=ax).max() for ax in range(v.ndim)]
        return float(max(edges))

    def tail_mass_bound(self) -> float:
        b = self._boundary_max()
        if b == 0:
            return 0.0
        if self.tail is None:
            return float("inf")
        p, r = self.tail.exponent, self.tail.rate
        n = self.n
        if r == 0 and p <= n:
            return float("inf")
        from scipy import integrate

        # shell area of the sup-norm sphere of radius rho is 2n (2 rho)^(n-1); only the
        # positive orthant part (1/2^n of it) carries mass
        f = lambda rho: b * (rho / self.U) ** (-p) * np.exp(-r * (rho - self.U)) * n * rho ** (n - 1)
        val, _ = integrate.quad(f, self.U, np.inf, limit=200)
        return float(val)

    def _check_tail(self):
        bound = self.tail_mass_bound()
        if not np.isfinite(bound) or bound > self.tail_tol:
            raise IntegrabilityError(
                f"density tail beyond U={self.U} not integrable to {self.tail_tol:g} "
                f"(bound {bound:g}); declare a faster-decaying tail or enlarge the grid")

    def _nodes(self):
        N = self.values.shape[0]
        ax = (np.arange(N) + 1) * self.h
        mesh = np.meshgrid(*([ax] * self.n), indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        w = self.values.ravel() * self.h ** self.n
        keep = w > 0
        return pts[keep], w[keep]

    def integrate(self, z):
        z = _as_points(z, self.n)
        pts, w = self._nodes()
        flat = z.reshape(-1, self.n)
        out = np.empty(flat.shape[0], dtype=complex)
        for s in range(0, flat.shape[0], 256):
            out[s:s + 256] = np.expm1(flat[s:s + 256] @ pts.T) @ w
        return out.reshape(z.shape[:-1])

    def total_mass(self):
        return float(self.values.sum() * self.h ** self.n)

    def first_moment(self):
        pts, w = self._nodes()
        return w @ pts

    def nodes(self, eps, W):
        pts, w = self._nodes()
        return LevyNodes(pts, w, np.zeros(self.n), 0.0)

    def payload(self):
        tail = None if self.tail is None else {"exponent": self.tail.exponent, "rate": self.tail.rate}
        return {"U": self.U, "h": self.h, "shape": list(self.values.shape),
                "values": self.values.ravel().tolist(), "tail": tail}


@dataclass(frozen=True, eq=False)
class RayLaw(LevyMeasure):
    """Image of ``C r^(-1-alpha) e^(-lam r) dr`` under ``r -> r a``."""

    family: str
    alpha: float
    lam: float
    C: float
    a: np.ndarray
    variant = "ClosedForm"

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        if np.any(a < 0) or not np.any(a > 0):
            raise ParameterError("direction weights must be nonnegative and not all zero")
        rq.check_params(self.alpha, self.lam, self.C)
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def _x(self, z):
        return _as_points(z, self.n) @ self.a

    def integrate(self, z):
        return rq.levy_integral(self._x(z), self.alpha, self.lam, self.C)

    def closed(self, z):
        return rq.closed_form(self._x(z), self.alpha, self.lam, self.C)

    def derivative_closed(self, x):
        return rq.closed_form_derivative(x, self.alpha, self.lam, self.C)

    def direction(self):
        return self.a

    def radial(self, x, method="quadrature"):
        x = np.asarray(x, dtype=complex)
        if method == "quadrature":
            return rq.levy_integral(x, self.alpha, self.lam, self.C)
        return rq.closed_form(x, self.alpha, self.lam, self.C)

    def total_mass(self):
        return rq.total_mass(self.alpha, self.lam, self.C)

    def first_moment(self):
        return rq.first_moment(self.alpha, self.lam, self.C) * self.a

    def nodes(self, eps, W):
        r, w = rq.radial_nodes(self.alpha, self.lam, self.C, eps, W)
        small = rq.small_moment(1, eps, self.alpha, self.lam, self.C) * self.a
        far = rq.far_mass(W, self.alpha, self.lam, self.C)
        return LevyNodes(r[:, None] * self.a[None, :], w, small, far)

    def payload(self):
        p = {"family": self.family, "direction": self.a.tolist()}
        if self.family == "stable":
            p["alpha"] = self.alpha
        elif self.family == "tempered":
            p.update(alpha=self.alpha, lam=self.lam, C=self.C)
        return p


@dataclass(frozen=True, eq=False)
class Example1Measure(LevyMeasure):
    """Two-variable measure whose Lévy integral is the divided difference of ``base``.

    For an atom of ``mu_1`` at ``v`` the image measure is Lebesgue length on the
    segment ``{u1 + u2 = v, u >= 0}``; a density ``p`` maps to ``p(u1 + u2) du``
    on the whole quadrant.
    """

    base: "BernsteinFunction"
    variant = "ClosedForm"
    family = "example1"

    def __post_init__(self):
        b = self.base
        if b.n != 1:
            raise ParameterError("the divided-difference construction needs a one-variable base")
        if np.any(b.c1 != 0):
            raise ParameterError("base must have zero drift")
        if not isinstance(b.measure, (Atoms, RayLaw)):
            raise ParameterError("base measure must be atomic or a closed-form ray law")
        omega = float(np.atleast_1d(b.measure.first_moment())[0])
        if not np.isfinite(omega):
            raise ParameterError("psi_1'(0-) is infinite; the construction needs a finite slope at 0")
        object.__setattr__(self, "omega", omega)

    n = 2

    def integrate(self, z):
        z = _as_points(z, 2)
        z1, z2 = z[..., 0], z[..., 1]
        m = self.base.measure
        if isinstance(m, Atoms):
            out = np.zeros(z1.shape, dtype=complex)
            for v, w in zip(m.locations[:, 0], m.weights):
                out += w * _segment_integral(z1, z2, v)
            return out
        return self._density_integral(z1, z2, m)

    def _density_integral(self, z1, z2, m: RayLaw):
        scale = max(1.0, float(np.max(np.abs(np.stack([z1, z2])))))
        eps = 1e-10 / scale
        W = (_DECAY_W / m.lam) if m.lam > 0 else 1e6
        v, w = rq.radial_nodes(m.alpha, m.lam, m.C, eps, W, order=24, max_width=4.0 / scale)
        flat1, flat2 = z1.ravel(), z2.ravel()
        out = np.empty(flat1.shape, dtype=complex)
        for s in range(0, flat1.size, 128):
            a1 = flat1[s:s + 128, None]
            a2 = flat2[s:s + 128, None]
            out[s:s + 128] = _divided_exp(a1, a2, v[None, :]) @ w
        small = rq.small_moment(2, eps, m.alpha, m.lam, m.C)
        out += 0.5 * (flat1 + flat2) * small
        return out.reshape(z1.shape)

    def closed(self, z):
        base_closed = self.base.measure.closed
        z = _as_points(z, 2)
        shape = z.shape[:-1]
        z1, z2 = z[..., 0].ravel(), z[..., 1].ravel()
        f1 = base_closed(z1[:, None])
        f2 = base_closed(z2[:, None])
        diff = z1 - z2
        # the midpoint derivative is second-order accurate for the divided difference
        close = np.abs(diff) <= 1e-6 * (1.0 + np.abs(z1))
        safe = np.where(close, 1.0, diff)
        out = (f1 - f2) / safe
        if np.any(close):
            mid = 0.5 * (z1 + z2)[close]
            out[close] = self._base_derivative(mid)
        return (out - self.omega).reshape(shape)

    def _base_derivative(self, x):
        m = self.base.measure
        if isinstance(m, Atoms):
            v = m.locations[:, 0]
            return np.exp(np.multiply.outer(x, v)) @ (m.weights * v)
        return m.derivative_closed(x)

    def total_mass(self):
        return self.omega

    def first_moment(self):
        m = self.base.measure
        if isinstance(m, Atoms):
            v = m.locations[:, 0]
            return np.full(2, 0.5 * np.sum(m.weights * v ** 2))
        # second moment of a tempered law
        return np.full(2, 0.5 * m.C * m.lam ** (m.alpha - 2) * special.gamma(2 - m.alpha))

    def nodes(self, eps, W):
        gx, gw = rq.gauss_legendre(16)
        y = 0.5 * (gx + 1.0)
        wy = 0.5 * gw
        m = self.base.measure
        if isinstance(m, Atoms):
            pts, wts = [], []
            for v, w in zip(m.locations[:, 0], m.weights):
                x = v * y
                pts.append(np.stack([x, v - x], axis=1))
                wts.append(w * v * wy)
            return LevyNodes(np.concatenate(pts), np.concatenate(wts), np.zeros(2), 0.0)
        v, w = rq.radial_nodes(m.alpha, m.lam, m.C, eps, W)
        x = v[:, None] * y[None, :]
        pts = np.stack([x.ravel(), (v[:, None] - x).ravel()], axis=1)
        wts = (w[:, None] * v[:, None] * wy[None, :]).ravel()
        small = np.full(2, 0.5 * rq.small_moment(2, eps, m.alpha, m.lam, m.C))
        far = _far_first_moment(W, m)
        return LevyNodes(pts, wts, small, far)

    def direction(self):
        return None

    def payload(self):
        from .serialize import psi_to_dict

        return {"family": "example1", "base": psi_to_dict(self.base)}


_DECAY_W = 60.0


def _far_first_moment(W: float, m: RayLaw) -> float:
    if m.lam == 0:
        return float("inf")
    s = 1.0 - m.alpha
    return float(m.C * m.lam ** (-s) * special.gamma(s) * special.gammaincc(s, m.lam * W))


def _divided_exp(z1, z2, v):
    """``(exp(z1 v) - exp(z2 v)) / (z1 - z2) - v`` evaluated without cancellation."""
    # symmetric in (z1, z2); order them so that Re(z1 - z2) <= 0 and nothing overflows
    swap = (z1 - z2).real > 0
    z1, z2 = np.where(swap, z2, z1), np.where(swap, z1, z2)
    d = z1 - z2
    small = np.abs(d * v) < 1e-3
    dv = d * v
    e2 = np.exp(z2 * v)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(small, 1.0 + dv / 2 + dv ** 2 / 6 + dv ** 3 / 24, np.expm1(dv) / np.where(small, 1.0, dv))
    # e2 * v * ratio - v, with e2 - 1 via expm1 for small z2 v
    return v * (np.expm1(z2 * v) * ratio + (ratio - 1.0))


def _segment_integral(z1, z2, v, order: int = 16):
    """``int_0^v (exp(z1 x + z2 (v - x)) - 1) dx`` by composite Gauss-Legendre."""
    gx, gw = rq.gauss_legendre(order)
    spread = float(np.max(np.abs(z1 - z2))) * v + float(np.max(np.abs(z2))) * v
    panels = int(np.clip(np.ceil(spread / 2.0), 1, 2048))
    edges = np.linspace(0.0, 1.0, panels + 1)
    lo, hi = edges[:-1], edges[1:]
    y = (0.5 * (hi - lo)[:, None] * gx + 0.5 * (hi + lo)[:, None]).ravel()
    wy = (0.5 * (hi - lo)[:, None] * gw).ravel()
    phase = v * z2[..., None] + v * (z1 - z2)[..., None] * y
    return v * (np.expm1(phase) @ wy)


@dataclass(frozen=True, eq=False)
class SumMeasure(LevyMeasure):
    """Nonnegative combination of measures of a common dimension."""

    terms: tuple
    variant = "Sum"

    @property
    def n(self) -> int:
        return self.terms[0][1].n

    def integrate(self, z):
        return sum(c * m.integrate(z) for c, m in self.terms)

    def closed(self, z):
        parts = [m.closed(z) for _, m in self.terms]
        if any(p is None for p in parts):
            return None
        return sum(c * p for (c, _), p in zip(self.terms, parts))

    def total_mass(self):
        return float(sum(c * m.total_mass() for c, m in self.terms if c > 0))

    def first_moment(self):
        return sum(c * np.asarray(m.first_moment(), dtype=float) for c, m in self.terms if c > 0)

    def nodes(self, eps, W):
        parts = [(c, m.nodes(eps, W)) for c, m in self.terms if c > 0]
        if not parts:
            return LevyNodes(np.zeros((0, self.n)), np.zeros(0), np.zeros(self.n), 0.0)
        return LevyNodes(
            np.concatenate([p.points for _, p in parts]),
            np.concatenate([c * p.weights for c, p in parts]),
            sum(c * p.small_first for c, p in parts),
            float(sum(c * p.far_mass for c, p in parts)))

    def direction(self):
        dirs = [m.direction() for c, m in self.terms if c > 0]
        if not dirs or any(d is None for d in dirs):
            return None if self.n > 1 or not dirs else np.ones(1)
        d0 = dirs[0] / dirs[0].sum()
        if all(np.allclose(d / d.sum(), d0, atol=1e-14) for d in dirs):
            return dirs[0] if len(dirs) == 1 else d0
        return None

    def radial(self, x, method="quadrature"):
        d = self.direction()
        out = 0.0
        for c, m in self.terms:
            if c == 0:
                continue
            md = m.direction()
            # bring every term to the common parametrization r -> r d
            k = float(md.sum() / d.sum()) if self.n > 1 else 1.0
            out = out + c * m.radial(np.asarray(x) * k, method)
        return out

    def atoms(self):
        parts = [(c, m.atoms()) for c, m in self.terms if c > 0]
        if not parts or any(p is None for _, p in parts):
            return None
        return (np.concatenate([p[0] for _, p in parts]),
                np.concatenate([c * p[1] for c, p in parts]))

    def payload(self):
        from .serialize import measure_to_dict

        return {"terms": [{"coef": c, "measure": measure_to_dict(m)} for c, m in self.terms]}


@dataclass(frozen=True, eq=False)
class BernsteinFunction:
    n: int
    measure: LevyMeasure
    c0: float = 0.0
    c1: np.ndarray = field(default=None)
    label: str = ""

    def __post_init__(self):
        c1 = np.zeros(self.n) if self.c1 is None else np.atleast_1d(np.asarray(self.c1, dtype=float))
        if c1.shape != (self.n,):
            raise ParameterError("drift vector has the wrong length")
        if self.c0 > 0:
            raise ParameterError("c0 must be <= 0")
        if np.any(c1 < 0):
            raise ParameterError("drift coefficients must be nonnegative")
        if self.measure.n != self.n:
            raise ParameterError("measure dimension does not match n")
        object.__setattr__(self, "c1", c1)
        check = self.measure.integrate(-np.ones((1, self.n)))
        if not np.all(np.isfinite(check)):
            raise IntegrabilityError("int (1 - exp(-1.u)) dmu is not finite")

    @property
    def is_T0(self) -> bool:
        """Class with ``c0 = 0`` and ``c1 = 0``: the only one the operator side accepts."""
        return self.c0 == 0 and not np.any(self.c1)

    @property
    def has_closed_form(self) -> bool:
        try:
            return self.measure.closed(-np.ones((1, self.n))) is not None
        except ParameterError:
            return False

    def __call__(self, z, method: str = "auto"):
        return eval_complex(self, z, method=method)


@dataclass(frozen=True, eq=False)
class RawFunction:
    """Arbitrary evaluator, for probing the criteria with non-Bernstein input."""

    n: int
    func: Callable[[np.ndarray], np.ndarray]
    label: str = "raw"
    is_T0 = False
    has_closed_form = False

    def __call__(self, z, method: str = "auto"):
        return eval_complex(self, z, method=method)


def _evaluate(psi, z: np.ndarray, method: str) -> np.ndarray:
    if isinstance(psi, RawFunction):
        return np.asarray(psi.func(z), dtype=complex)
    val = _dispatch(psi.measure, z, method)
    return psi.c0 + z @ psi.c1 + val


def eval_real(psi, s, method: str = "quadrature"):
    """Value of ``psi`` at real points of the closed negative orthant.

    ``s`` has shape ``(..., n)`` (a bare scalar or 1-d array is fine for
    ``n = 1``).  Returns a float array of shape ``s.shape[:-1]``.
    """
    s_arr = np.asarray(s, dtype=float)
    z = _as_points(s_arr, psi.n).real
    if np.any(z > 0):
        raise DomainError("eval_real needs every coordinate <= 0")
    out = _evaluate(psi, z.astype(complex), method).real
    return float(out) if out.ndim == 0 else out


def eval_complex(psi, z, method: str = "quadrature"):
    """Holomorphic extension to ``{Re z_j <= 0}``."""
    z = _as_points(z, psi.n)
    if np.any(z.real > 0):
        raise DomainError("eval_complex needs Re z_j <= 0 for every coordinate")
    out = _evaluate(psi, z, method)
    return complex(out) if np.ndim(out) == 0 else out


def make_stable(alpha: float, a: Sequence[float] = (1.0,)) -> BernsteinFunction:
    """``psi(s) = -(-a.s)^alpha`` via the Lévy density ``alpha/Gamma(1-alpha) u^(-1-alpha)``."""
    if not 0 < alpha < 1:
        raise ParameterError(f"stable index must lie in (0, 1), got {alpha}")
    m = RayLaw("stable", float(alpha), 0.0, float(alpha / special.gamma(1 - alpha)), np.asarray(a, float))
    return BernsteinFunction(m.n, m, label=f"stable({alpha:g})")


def make_gamma(a: Sequence[float] = (1.0,)) -> BernsteinFunction:
    """``psi(s) = -log(1 - a.s)``, Lévy density ``u^(-1) e^(-u)``."""
    m = RayLaw("gamma", 0.0, 1.0, 1.0, np.asarray(a, float))
    return BernsteinFunction(m.n, m, label="gamma")


def make_tempered(alpha: float, lam: float, C: float = 1.0,
                  a: Sequence[float] = (1.0,)) -> BernsteinFunction:
    m = RayLaw("tempered", float(alpha), float(lam), float(C), np.asarray(a, float))
    return BernsteinFunction(m.n, m, label=f"tempered({alpha:g},{lam:g})")


def make_atoms(locations, weights) -> BernsteinFunction:
    m = Atoms(np.asarray(locations, float), np.asarray(weights, float))
    return BernsteinFunction(m.n, m, label="atoms")


def make_example1(psi1: BernsteinFunction) -> BernsteinFunction:
    """Two-variable function ``(psi1(s1) - psi1(s2))/(s1 - s2) - psi1'(0-)``."""
    m = Example1Measure(psi1)
    return BernsteinFunction(2, m, label=f"example1[{psi1.label}]")


def linear_combine(terms: Sequence[tuple[float, BernsteinFunction]]) -> BernsteinFunction:
    if not terms:
        raise ParameterError("empty combination")
    n = terms[0][1].n
    for c, f in terms:
        if c < 0:
            raise ParameterError("combination coefficients must be nonnegative")
        if f.n != n:
            raise ParameterError("all terms must have the same dimension")
    m = SumMeasure(tuple((float(c), f.measure) for c, f in terms))
    c0 = float(sum(c * f.c0 for c, f in terms))
    c1 = sum(c * f.c1 for c, f in terms)
    label = " + ".join(f"{c:g}*{f.label}" for c, f in terms)
    return BernsteinFunction(n, m, c0=c0, c1=c1, label=label)


@dataclass(frozen=True)
class MonotonicityReport:
    passed: bool
    min_negated_value: float
    min_partial: float
    worst_point: list
    points: int


def monotonicity_probe(psi, grid, tol: float = 1e-10, step: float = 1e-6,
                       method: str = "auto") -> MonotonicityReport:
    """Spot check of ``psi <= 0`` and nonnegative first partials on sample points."""
    pts = np.asarray(grid, dtype=float)
    if psi.n == 1 and (pts.ndim == 1):
        pts = pts[:, None]
    pts = pts.reshape(-1, psi.n)
    if np.any(pts >= 0):
        raise DomainError("probe grid must lie in the open negative orthant")
    vals = eval_complex(psi, pts, method=method).real
    vals = np.atleast_1d(vals)
    neg_vals = -vals
    worst_partial = np.full(pts.shape[0], np.inf)
    for j in range(psi.n):
        h = step * (1.0 + np.abs(pts[:, j]))
        fwd = pts[:, j] + h < 0
        shifted = pts.copy()
        shifted[:, j] = np.where(fwd, pts[:, j] + h, pts[:, j] - h)
        other = np.atleast_1d(eval_complex(psi, shifted, method=method).real)
        d = np.where(fwd, (other - vals) / h, (vals - other) / h)
        worst_partial = np.minimum(worst_partial, d)
    score = np.minimum(neg_vals, worst_partial)
    i = int(np.argmin(score))
    return MonotonicityReport(
        passed=bool(score[i] >= -tol),
        min_negated_value=float(neg_vals.min()),
        min_partial=float(worst_partial.min()),
        worst_point=pts[i].tolist(),
        points=int(pts.shape[0]))
