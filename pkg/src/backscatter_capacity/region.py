"""Rate loss when the reflection coefficient is confined to a subset of the disk."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize, signal
from scipy.spatial import ConvexHull

from .core import as_linear
from .mi import LOG2E

GRID_N = 2048


class GammaRegion:
    """Subset of the closed unit disk given by a vectorized membership test.

    ``contains`` takes a complex array and returns a boolean array; points
    outside the unit disk are excluded automatically.
    """

    def __init__(self, contains: Callable, name: str = "region", d_max: float | None = None,
                 grid_n: int = GRID_N):
        self._contains = contains
        self.name = name
        self.grid_n = grid_n
        self._area = None
        self._d_max = d_max

    def contains(self, g):
        g = np.asarray(g, dtype=complex)
        return (np.abs(g) <= 1.0) & np.asarray(self._contains(g), dtype=bool)

    def _grid_rows(self, n):
        h = 2.0 / n
        axis = -1.0 + h * (np.arange(n) + 0.5)
        for im in axis:
            yield axis + 1j * im, h

    @property
    def area(self) -> float:
        if self._area is None:
            n = self.grid_n
            count = 0
            for row, h in self._grid_rows(n):
                count += int(np.count_nonzero(self.contains(row)))
            self._area = count * (2.0 / n) ** 2
        return self._area

    @property
    def d_max(self) -> float:
        """Largest pairwise distance, from the convex hull of member grid points."""
        if self._d_max is None:
            pts = []
            for row, _ in self._grid_rows(512):
                pts.append(row[self.contains(row)])
            pts = np.concatenate(pts)
            if pts.size < 3:
                self._d_max = 0.0 if pts.size < 2 else float(abs(pts[0] - pts[1]))
            else:
                xy = np.c_[pts.real, pts.imag]
                hull = xy[ConvexHull(xy).vertices]
                diff = hull[:, None, :] - hull[None, :, :]
                self._d_max = float(np.sqrt((diff**2).sum(-1)).max())
        return self._d_max


def full_disk() -> GammaRegion:
    return GammaRegion(lambda g: np.ones(g.shape, bool), "disk", d_max=2.0)


def half_disk() -> GammaRegion:
    return GammaRegion(lambda g: g.imag >= 0, "half-disk", d_max=2.0)


def inscribed_square() -> GammaRegion:
    s = 1.0 / math.sqrt(2.0)
    return GammaRegion(lambda g: (np.abs(g.real) <= s) & (np.abs(g.imag) <= s), "square", d_max=2.0)


@dataclass(frozen=True)
class ReactanceBandConstraint:
    """Capacitance within ``(1 -+ delta)`` of resonance on a coil with Q ``q_factor``."""

    delta: float
    q_factor: float

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if not self.q_factor > 0.0:
            raise ValueError("q_factor must be positive")

    @property
    def band(self) -> tuple:
        d, q = self.delta, self.q_factor
        return -d / (1.0 - d) * q, d / (1.0 + d) * q


def region_from_reactance_band(c: ReactanceBandConstraint) -> GammaRegion:
    """Image of ``{r + jx : r >= 0, x in band}`` under the reflection map."""
    lo, hi = c.band

    def contains(g):
        den = np.abs(1.0 - g) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            x = 2.0 * g.imag / den
        return (den > 0) & (x >= lo) & (x <= hi)

    return GammaRegion(contains, f"reactance-band(delta={c.delta})", d_max=2.0)


def region_area(g: GammaRegion) -> float:
    return g.area


def region_area_mc(g: GammaRegion, n_samples: int = 10**6, seed: int = 0) -> tuple:
    """Monte Carlo area estimate and its standard error."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, n_samples) + 1j * rng.uniform(-1, 1, n_samples)
    hit = g.contains(pts).mean()
    return 4.0 * hit, 4.0 * math.sqrt(hit * (1.0 - hit) / n_samples)


def excluded_area_fraction(g: GammaRegion) -> float:
    return 1.0 - g.area / math.pi


def high_snr_rate_loss(g: GammaRegion) -> float:
    """``log2(pi / area)``: rate penalty of the region at high SNR."""
    area = g.area
    if area <= 0:
        raise ValueError("region has zero area")
    return max(0.0, math.log2(math.pi / area))


def low_snr_rate(g: GammaRegion, rho) -> float:
    return (g.d_max / 2.0) ** 2 * as_linear(rho) * LOG2E


def constrained_rate_lower_bound(g: GammaRegion, rho) -> float:
    area = g.area
    if area <= 0:
        raise ValueError("region has zero area")
    return math.log2(1.0 + area / math.pi * as_linear(rho) / math.e)


def mi_uniform_region(g: GammaRegion, rho, points_per_std: float = 4.0) -> float:
    """MI of uniform signaling on the region, by grid convolution.

    The output density is the region indicator convolved with the noise
    kernel, evaluated on a square grid by FFT; MI = h(y) - h(w).
    """
    rho = as_linear(rho)
    sigma = 1.0 / math.sqrt(2.0 * rho)
    h = min(sigma / points_per_std, 0.004)
    ext = 1.0 + 8.0 * sigma
    n = int(math.ceil(2.0 * ext / h))
    axis = -ext + h * (np.arange(n) + 0.5)
    yy = axis[None, :] + 1j * axis[:, None]
    ind = g.contains(yy).astype(float)
    if ind.sum() == 0:
        raise ValueError("region has zero area")
    p_in = ind / ind.sum()
    k = np.arange(-int(8 * sigma / h) - 1, int(8 * sigma / h) + 2) * h
    k1 = np.exp(-(k**2) / (2 * sigma**2))
    k1 /= k1.sum()
    mass = signal.fftconvolve(signal.fftconvolve(p_in, k1[None, :], "same"), k1[:, None], "same")
    mass = mass[mass > 1e-300]
    f = mass / h**2
    h_y = -np.sum(mass * np.log(f))
    h_w = math.log(math.pi * math.e / rho)
    return (h_y - h_w) * LOG2E


def calibrate_q_factor(delta: float = 0.05, target_excluded: float = 0.612,
                       bracket=(0.5, 1e3), grid_n: int = GRID_N) -> float:
    """Coil Q-factor for which ``delta`` excludes ``target_excluded`` of the disk."""

    def gap(q):
        r = region_from_reactance_band(ReactanceBandConstraint(delta, q))
        r.grid_n = grid_n
        return excluded_area_fraction(r) - target_excluded

    return optimize.brentq(gap, *bracket, xtol=1e-6)


def lens_area(x: float) -> float:
    """Area of ``{Im z > |x|}`` inside the disk, in closed form.

    The constant-reactance circle (center ``1 + j/x``, radius ``1/|x|``) is
    orthogonal to the unit circle, so the lens area is
    ``atan R + R^2 atan(1/R) - R`` with ``R = 1/|x|``.
    """
    if x == 0:
        return math.pi / 2.0
    r = 1.0 / abs(x)
    return math.atan(r) + r * r * math.atan(1.0 / r) - r
