"""Independent reference values, computed without the package's quadrature or inversion."""

import numpy as np
from scipy import integrate, special, stats


def stable_half_density(u, t):
    """One-sided 1/2-stable law with Laplace transform exp(-t sqrt(s))."""
    u = np.asarray(u, float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = t / (2 * np.sqrt(np.pi)) * u ** -1.5 * np.exp(-t * t / (4 * u))
    return np.where(u > 0, out, 0.0)


def stable_half_cdf(u, t):
    u = np.asarray(u, float)
    with np.errstate(divide="ignore"):
        return np.where(u > 0, special.erfc(t / (2 * np.sqrt(np.maximum(u, 1e-300)))), 0.0)


def gamma_cdf(u, t):
    return stats.gamma(t).cdf(u)


def stable_psi(z, alpha):
    """Principal branch of -(-z)^alpha."""
    return -np.power(-np.asarray(z, complex), alpha)


def gamma_psi(z):
    return -np.log(1 - np.asarray(z, complex))


def tempered_psi(z, alpha, lam, C=1.0):
    """Direct adaptive quadrature of the tempered Lévy integral, real z only."""
    def f(u):
        return C * u ** (-1 - alpha) * np.exp(-lam * u) * np.expm1(z * u)
    a, _ = integrate.quad(f, 0, 1, limit=200)
    b, _ = integrate.quad(f, 1, np.inf, limit=200)
    return a + b


def l1_to_cdf(weights, atom, defect, h, cdf):
    """L1 distance of cell masses to an exact CDF, plus the mismatch of the tail mass."""
    N = weights.shape[0]
    edges = np.arange(N + 1) * h
    exact = np.diff(cdf(edges))
    tail = 1.0 - cdf(edges[-1:])[0]
    return float(np.abs(weights - exact).sum() + abs(atom) + abs(defect - tail))


def example1_direct(s1, s2, psi1, dpsi1, omega):
    """Divided difference of psi1, with the derivative on the diagonal."""
    s1 = np.asarray(s1, float)
    s2 = np.asarray(s2, float)
    same = np.isclose(s1, s2, rtol=0, atol=1e-12)
    with np.errstate(invalid="ignore", divide="ignore"):
        dd = (psi1(s1) - psi1(s2)) / (s1 - s2)
    return np.where(same, dpsi1(s1), dd) - omega


def poly_battery(seed=0, size=10, n=1):
    """Fixed list of (coefs, exps) pairs with 1 to 4 terms and rates in [0.1, 5]."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(size):
        m = int(rng.integers(1, 5))
        rates = np.exp(rng.uniform(np.log(0.1), np.log(5.0), size=(m, n)))
        exps = -rates + 1j * rng.uniform(-2, 2, size=(m, n)) * (rng.random() < 0.5)
        coefs = rng.normal(size=m) + 1j * rng.normal(size=m)
        out.append((coefs, exps))
    return out
