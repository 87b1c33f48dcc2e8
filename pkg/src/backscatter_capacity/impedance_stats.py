"""Distributions carried between the reflection-coefficient and impedance planes."""
from __future__ import annotations

import math

import numpy as np
from scipy import special
from scipy.spatial import cKDTree

from .core import gamma_from_z, z_from_gamma


def z_circle_from_gamma_circle(a: float) -> tuple:
    """Image of ``|gamma| = a`` in the z-plane: ``(center, radius)`` on the real axis."""
    if not 0.0 <= a < 1.0:
        raise ValueError("radius must lie in [0, 1)")
    den = 1.0 - a * a
    return (1.0 + a * a) / den, 2.0 * a / den


def _check_radius(a):
    a = np.asarray(a, dtype=float)
    if np.any((a < 0) | (a >= 1)):
        raise ValueError("radius must lie in [0, 1)")
    return a


def beta_angle(theta, a):
    """Angle around the image circle's center of the point ``a e^{j theta}``.

    Continuous, increasing bijection of [0, 2 pi) onto itself.
    """
    a = _check_radius(a)
    theta = np.asarray(theta, dtype=float)
    b = 2.0 * np.arctan2(np.sin(theta), np.cos(theta) - a) - theta
    out = np.mod(b, 2.0 * math.pi)
    return out[()] if out.ndim == 0 else out


def beta_derivative(theta, a):
    """``d beta / d theta = (1 - a^2) / (1 - 2 a cos theta + a^2)``."""
    a = _check_radius(a)
    return (1.0 - a * a) / (1.0 - 2.0 * a * np.cos(theta) + a * a)


def theta_from_beta(beta, a, iters: int = 64):
    """Invert :func:`beta_angle` by bisection on [0, 2 pi]."""
    _check_radius(a)
    beta = np.mod(np.asarray(beta, dtype=float), 2.0 * math.pi)
    lo = np.zeros_like(beta)
    hi = np.full_like(beta, 2.0 * math.pi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        # unwrapped beta on [0, 2 pi]; the mod only bites at mid = 2 pi
        below = beta_angle(mid, a) < beta
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    return out[()] if out.ndim == 0 else out


def conditional_angle_pdf(theta, a):
    """Density of beta given radius ``a``, expressed at the preimage angle theta."""
    a = _check_radius(a)
    theta = np.asarray(theta, dtype=float)
    out = (1.0 - 2.0 * a * np.cos(theta) + a * a) / (2.0 * math.pi * (1.0 - a * a))
    return out[()] if out.ndim == 0 else out


def beta_pdf(beta, a):
    return conditional_angle_pdf(theta_from_beta(beta, a), a)


def reactance_pdf_unit_circle(x):
    """Standard Cauchy: reactance of ``e^{j theta}`` with uniform theta."""
    x = np.asarray(x, dtype=float)
    out = 1.0 / (math.pi * (1.0 + x * x))
    return out[()] if out.ndim == 0 else out


def reactance_cdf_unit_circle(x):
    return 0.5 + np.arctan(x) / math.pi


def resistance_pdf_uniform_real(r):
    """Beta-prime(1, 1) density and CDF of ``(1 + g)/(1 - g)``, g uniform on (-1, 1)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("resistance must be nonnegative")
    pdf = 1.0 / (1.0 + r) ** 2
    cdf = r / (1.0 + r)
    if pdf.ndim == 0:
        return pdf[()], cdf[()]
    return pdf, cdf


def polar_jacobian(a, theta):
    """``|det d(r, x)/d(a, theta)|`` of ``z = (1 + a e^{j theta})/(1 - a e^{j theta})``.

    Holomorphic maps scale areas by ``|dz/dgamma|^2 = 4/|1 - gamma|^4``;
    polar coordinates contribute the factor ``a``.
    """
    g = np.asarray(a) * np.exp(1j * np.asarray(theta))
    return np.asarray(a) * 4.0 / np.abs(1.0 - g) ** 4


def z_pdf_uniform_disk(z):
    """Density of ``z`` when gamma is uniform on the unit disk."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.real <= 0):
        raise ValueError("z must lie in the open right half-plane")
    g = gamma_from_z(z)
    a = np.abs(g)
    th = np.angle(g)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(a > 0, (a / math.pi) / polar_jacobian(a, th),
                       np.abs(1.0 - g) ** 4 / (4.0 * math.pi))
    return out[()] if out.ndim == 0 else out


# samplers --------------------------------------------------------------

def sample_beta(a: float, n: int, seed: int = 0) -> np.ndarray:
    """Angles around the image-circle center of uniform-phase points of radius a."""
    c, _ = z_circle_from_gamma_circle(a)
    rng = np.random.default_rng(seed)
    z = z_from_gamma(a * np.exp(2j * math.pi * rng.random(n)))
    return np.mod(np.angle(z - c), 2.0 * math.pi)


def sample_reactance_unit_circle(n: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    theta = 2.0 * math.pi * rng.random(n)
    theta = theta[theta > 0]
    return np.imag(z_from_gamma(np.exp(1j * theta)))


def sample_resistance_uniform_real(n: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    g = rng.uniform(-1.0, 1.0, n)
    return np.real(z_from_gamma(g))


def sample_region(region, n: int, seed: int = 0) -> np.ndarray:
    """Uniform samples from a :class:`GammaRegion` by rejection from the square."""
    rng = np.random.default_rng(seed)
    out = []
    have = 0
    while have < n:
        g = rng.uniform(-1, 1, 2 * n) + 1j * rng.uniform(-1, 1, 2 * n)
        g = g[region.contains(g)]
        out.append(g)
        have += g.size
    return np.concatenate(out)[:n]


def knn_entropy(samples, k: int = 1) -> float:
    """Kozachenko-Leonenko differential entropy estimate in bits.

    ``samples`` is complex (treated as 2-D) or an ``(n, d)`` real array.
    """
    x = np.asarray(samples)
    if np.iscomplexobj(x):
        x = np.c_[x.real, x.imag]
    x = np.atleast_2d(x)
    n, d = x.shape
    dist, _ = cKDTree(x).query(x, k=k + 1)
    eps = dist[:, k]
    log_vd = 0.5 * d * math.log(math.pi) - special.gammaln(0.5 * d + 1.0)
    h = special.digamma(n) - special.digamma(k) + log_vd + d * np.mean(np.log(eps))
    return float(h / math.log(2.0))


def max_entropy_reference(region) -> float:
    """``log2(area)``: entropy of the uniform law, the largest on the region."""
    area = region.area
    if not 0.0 < area < math.inf:
        raise ValueError("degenerate region")
    return math.log2(area)


# plot-data grids -------------------------------------------------------

def beta_pdf_grid(a: float, n: int = 361):
    beta = np.linspace(0.0, 2.0 * math.pi, n)
    return beta, beta_pdf(beta, a)


def z_pdf_grid(r_max: float = 4.0, x_max: float = 4.0, n: int = 101):
    r = np.linspace(r_max / n, r_max, n)
    x = np.linspace(-x_max, x_max, n)
    rr, xx = np.meshgrid(r, x, indexing="ij")
    return rr, xx, z_pdf_uniform_disk(rr + 1j * xx)

