"""Quadrature for tempered power Lévy densities along a ray.

The radial density is ``C * u**(-1 - alpha) * exp(-lam * u)`` with
``alpha < 1``.  ``alpha in (0, 1)`` with ``lam = 0`` is the one-sided stable
law, ``alpha = 0`` with ``lam = 1`` and ``C = 1`` is the gamma law, and
``alpha < 0`` with ``lam > 0`` gives a finite (compound Poisson) measure.

The Lévy integral ``int (exp(x u) - 1) rho(u) du`` for ``Re x <= 0`` is split
into a power series on ``[0, eps]``, Gauss-Legendre panels on a log-graded
mesh ``eps * [2**k, 2**(k+1)]``, and an analytic tail.  For complex ``x`` the
ray of integration is rotated by half the argument of ``-x`` so both the
exponential and the tempering factor decay along it.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy import integrate, special

_SERIES_TERMS = 30
_DECAY = 45.0


@lru_cache(maxsize=16)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def check_params(alpha: float, lam: float, C: float) -> None:
    from .errors import ParameterError

    if not alpha < 1:
        raise ParameterError(f"tempered exponent must be < 1, got {alpha}")
    if lam < 0 or C < 0:
        raise ParameterError("tempering rate and scale must be nonnegative")
    if alpha <= 0 and lam == 0 and C > 0:
        raise ParameterError("alpha <= 0 needs a positive tempering rate to be a Lévy measure")


def closed_form(x, alpha: float, lam: float, C: float) -> np.ndarray:
    """Exact value of the Lévy integral, principal branch."""
    x = np.asarray(x, dtype=complex)
    if C == 0:
        return np.zeros_like(x)
    if alpha == 0:
        return -C * np.log1p(-x / lam)
    base = lam ** alpha if lam > 0 else 0.0
    return C * special.gamma(-alpha) * ((lam - x) ** alpha - base)


def closed_form_derivative(x, alpha: float, lam: float, C: float) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    return C * special.gamma(1 - alpha) * (lam - x) ** (alpha - 1)


def _series(D, L, eps, alpha, lam):
    k = np.arange(1, _SERIES_TERMS + 1, dtype=float)[:, None]
    logfact = special.gammaln(k + 1)
    with np.errstate(divide="ignore"):
        termA = np.exp(k * np.log(D * eps + 0j) - logfact)
        termB = np.exp(k * np.log(-L * eps + 0j) - logfact) if lam > 0 else 0.0
    return np.sum((termA - termB) / (k - alpha), axis=0) * eps ** (-alpha)


def levy_integral(x, alpha: float, lam: float, C: float, order: int = 24,
                  chunk: int = 4096) -> np.ndarray:
    """Quadrature value of ``int (exp(x u) - 1) C u^(-1-alpha) e^(-lam u) du``.

    ``x`` may be any array of complex numbers with nonpositive real part.
    """
    x = np.asarray(x, dtype=complex)
    flat = x.ravel()
    out = np.zeros(flat.shape, dtype=complex)
    if C == 0:
        return out.reshape(x.shape)
    for start in range(0, flat.size, chunk):
        sl = slice(start, start + chunk)
        out[sl] = _levy_chunk(flat[sl], alpha, lam, order)
    return (C * out).reshape(x.shape)


def _levy_chunk(x, alpha, lam, order):
    out = np.zeros(x.shape, dtype=complex)
    nz = x != 0
    if not nz.any():
        return out
    x = x[nz]
    phi = np.angle(-x)
    theta = -0.5 * phi
    rot = np.exp(1j * theta)
    X = x * rot
    L = lam * rot
    D = X - L
    eps = 0.25 / np.maximum(np.abs(X), np.abs(L))
    ser = _series(D, L, eps, alpha, lam)

    a = (-D).real
    b = L.real
    rate = np.where(b > 0, np.minimum(a, b), a)
    vmax = _DECAY / (rate * eps)
    K = int(np.ceil(np.log2(vmax.max()))) + 1
    gx, gw = gauss_legendre(order)
    lo = 2.0 ** np.arange(K)
    v = (0.5 * lo[:, None] * gx[None, :] + 1.5 * lo[:, None]).ravel()
    wv = (0.5 * lo[:, None] * gw[None, :]).ravel()
    w = eps[:, None] * v[None, :]
    integrand = (np.exp(D[:, None] * w) - np.exp(-L[:, None] * w)) * w ** (-1.0 - alpha)
    mid = (integrand @ wv) * eps
    tail = 0.0
    if lam == 0:
        W = eps * 2.0 ** K
        tail = -W ** (-alpha) / alpha
    out[nz] = np.exp(-1j * alpha * theta) * (ser + mid + tail)
    return out


def radial_nodes(alpha: float, lam: float, C: float, eps: float, W: float,
                 order: int = 16, max_width: float = np.inf) -> tuple[np.ndarray, np.ndarray]:
    """Real nodes/weights for the density on ``[eps, W]``, log-graded panels.

    Panels wider than ``max_width`` are split evenly, which keeps oscillatory
    integrands resolved.
    """
    if W <= eps:
        return np.zeros(0), np.zeros(0)
    K = int(np.ceil(np.log2(W / eps)))
    edges = eps * 2.0 ** np.arange(K + 1)
    edges[-1] = W
    if np.isfinite(max_width):
        pieces = [np.linspace(a, b, int(np.ceil((b - a) / max_width)) + 1)[:-1]
                  for a, b in zip(edges[:-1], edges[1:])]
        edges = np.append(np.concatenate(pieces), W)
    gx, gw = gauss_legendre(order)
    lo, hi = edges[:-1], edges[1:]
    r = (0.5 * (hi - lo)[:, None] * gx[None, :] + 0.5 * (hi + lo)[:, None]).ravel()
    w = (0.5 * (hi - lo)[:, None] * gw[None, :]).ravel()
    return r, w * density(r, alpha, lam, C)


def density(r, alpha, lam, C):
    r = np.asarray(r, dtype=float)
    return C * r ** (-1.0 - alpha) * np.exp(-lam * r)


def small_moment(k: int, eps: float, alpha: float, lam: float, C: float) -> float:
    """``int_0^eps u^k rho(u) du`` for ``k >= 1``."""
    s = k - alpha
    if lam == 0:
        return C * eps ** s / s
    return C * lam ** (-s) * special.gamma(s) * special.gammainc(s, lam * eps)


def far_mass(W: float, alpha: float, lam: float, C: float) -> float:
    """``int_W^inf rho(u) du``."""
    if C == 0:
        return 0.0
    if lam == 0:
        return C * W ** (-alpha) / alpha
    if alpha == 0:
        return C * float(special.exp1(lam * W))
    if lam * W > 700:
        return 0.0
    val, _ = integrate.quad(lambda u: u ** (-1.0 - alpha) * np.exp(-lam * u), W, np.inf)
    return C * val


def total_mass(alpha: float, lam: float, C: float) -> float:
    if C == 0:
        return 0.0
    if alpha < 0 and lam > 0:
        return C * lam ** alpha * special.gamma(-alpha)
    return float("inf")


def first_moment(alpha: float, lam: float, C: float) -> float:
    if C == 0:
        return 0.0
    if lam > 0:
        return C * lam ** (alpha - 1) * special.gamma(1 - alpha)
    return float("inf")


def upper_gamma(s: float, y: float) -> float:
    """``Gamma(s, y)`` for any real ``s`` and ``y > 0``, by upward recursion."""
    if s > 0:
        return float(special.gammaincc(s, y) * special.gamma(s))
    if s == 0:
        return float(special.exp1(y))
    return (upper_gamma(s + 1, y) - y ** s * np.exp(-y)) / s


def _far_one(x: complex, W: float, alpha: float, lam: float) -> complex:
    decay = lam - x.real
    if decay * W > 700:
        return 0j

    def base(u):
        return u ** (-1.0 - alpha) * np.exp(-decay * (u - W))

    if x.imag == 0 and (lam > 0 or x.real < 0) and decay * W <= 50:
        return complex(upper_gamma(-alpha, decay * W) * decay ** alpha)
    if x.imag == 0 and decay == 0:
        return complex(W ** (-alpha) / alpha)
    if x.imag == 0:
        re, _ = integrate.quad(base, W, np.inf, limit=200)
        return complex(re * np.exp(-decay * W))
    # Fourier-type quadrature on the half line handles the oscillation
    w = abs(x.imag)
    re, _ = integrate.quad(lambda v: base(v + W), 0, np.inf, weight="cos", wvar=w)
    im, _ = integrate.quad(lambda v: base(v + W), 0, np.inf, weight="sin", wvar=w)
    ph = np.exp(1j * x.imag * W)
    return complex(np.exp(-decay * W) * ph * (re + 1j * np.sign(x.imag) * im))


def far_transform(x, W: float, alpha: float, lam: float, C: float) -> np.ndarray:
    """``int_W^inf exp(x u) rho(u) du`` for ``Re x <= 0``."""
    x = np.asarray(x, dtype=complex)
    if C == 0:
        return np.zeros_like(x)
    out = np.array([_far_one(complex(v), W, alpha, lam) for v in x.ravel()])
    return C * out.reshape(x.shape)
