"""Finite constellations on the reflection-coefficient disk: APSK, PSK, QAM."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .capacity import capacity_general, dauip_fixed_k
from .core import Snr, as_linear
from .mi import DiscreteConstellation


def apsk_ring_sizes(k: int) -> list:
    """Symbols per ring, outermost first: ``8 (K - k) + 4`` for k = 1..K."""
    if k < 1:
        raise ValueError("ring count must be positive")
    return [8 * (k - i) + 4 for i in range(1, k + 1)]


def rings_for_size(m: int) -> int:
    k = math.isqrt(m // 4) if m > 0 else 0
    if m <= 0 or 4 * k * k != m:
        raise ValueError(f"APSK size must be of the form 4*K^2, got {m}")
    return k


@dataclass(frozen=True)
class ApskDesign:
    design_snr: Snr
    k: int
    ring_sizes: tuple
    ring_radii: tuple
    ring_probs: tuple
    constellation: DiscreteConstellation

    def metadata(self) -> dict:
        return {
            "design_snr_db": self.design_snr.db,
            "K": self.k,
            "ring_sizes": list(self.ring_sizes),
            "ring_radii": list(self.ring_radii),
            "ring_probs": list(self.ring_probs),
        }


def apsk_from_rings(radii, probs) -> DiscreteConstellation:
    """Place ``8(K-k)+4`` equally spaced symbols on each ring.

    Odd rings (k = 1, 3, ...) start at angle 0; even rings are rotated by
    half their angular spacing.  Symbol probability is the ring probability
    split evenly over the ring.
    """
    radii = np.asarray(radii, dtype=float)
    probs = np.asarray(probs, dtype=float)
    sizes = apsk_ring_sizes(radii.size)
    points, q = [], []
    for ring, (a, p_ring, m_k) in enumerate(zip(radii, probs, sizes), start=1):
        offset = math.pi / m_k if ring % 2 == 0 else 0.0
        ang = offset + 2.0 * math.pi * np.arange(m_k) / m_k
        points.append(a * np.exp(1j * ang))
        q.append(np.full(m_k, p_ring / m_k))
    q = np.concatenate(q)
    return DiscreteConstellation(np.concatenate(points), q / q.sum())


def design_apsk(m: int, design_snr) -> ApskDesign:
    """APSK resembling the capacity-achieving law at ``design_snr``.

    ``K = sqrt(m/4)`` rings; when the optimal circle count at the design
    SNR differs, radii and probabilities are re-optimized with K fixed.
    """
    k = rings_for_size(m)
    rho = as_linear(design_snr)
    opt = capacity_general(rho)
    point = opt if opt.k == k else dauip_fixed_k(rho, k)
    law = point.input_law
    c = apsk_from_rings(law.radii, law.probs)
    return ApskDesign(Snr(rho), k, tuple(apsk_ring_sizes(k)), tuple(law.radii),
                      tuple(law.probs), c)


def design_psk(m: int) -> DiscreteConstellation:
    """Ideal M-PSK, ``exp(j 2 pi (m - 1/2) / M)``, equiprobable."""
    if m < 2:
        raise ValueError("PSK needs at least 2 symbols")
    idx = np.arange(1, m + 1)
    return DiscreteConstellation(np.exp(2j * math.pi * (idx - 0.5) / m))


def design_qam(m: int) -> DiscreteConstellation:
    """Square QAM whose corner symbols touch the unit circle, equiprobable."""
    n = math.isqrt(m)
    if m < 4 or n * n != m or n % 2:
        raise ValueError(f"QAM size must be a square of an even integer, got {m}")
    ax = (2.0 * np.arange(n) - (n - 1)) / (n - 1) / math.sqrt(2.0)
    re, im = np.meshgrid(ax, ax, indexing="ij")
    pts = (re + 1j * im).ravel()
    # corners sit exactly on the unit circle; guard against rounding just above 1
    mag = np.abs(pts)
    pts = np.where(mag > 1.0, pts / mag, pts)
    return DiscreteConstellation(pts)
