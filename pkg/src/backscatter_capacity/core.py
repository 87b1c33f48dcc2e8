"""Circuit-level quantities of a load-modulating tag.

The tag load is described interchangeably by its normalized impedance
``z = Z_L / R_T`` (right half-plane) or its reflection coefficient
``gamma = (z - 1) / (z + 1)`` (closed unit disk).  The steady-state tag
current is ``(1 - gamma) * i_pm`` where ``i_pm`` is the current into a
matched load.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EPS_TOL = 1e-12


class OpenCircuitError(ValueError):
    """Raised when an impedance is requested for gamma = 1 (z = infinity)."""


@dataclass(frozen=True)
class Snr:
    """Linear signal-to-noise ratio with a dB view."""

    linear: float

    def __post_init__(self):
        if not (math.isfinite(self.linear) and self.linear > 0):
            raise ValueError(f"SNR must be positive and finite, got {self.linear!r}")

    @classmethod
    def from_db(cls, db: float) -> "Snr":
        return cls(10.0 ** (db / 10.0))

    @property
    def db(self) -> float:
        return 10.0 * math.log10(self.linear)

    def __float__(self):
        return float(self.linear)


def as_linear(rho) -> float:
    """Accept an :class:`Snr` or a plain positive float."""
    if isinstance(rho, Snr):
        return rho.linear
    return Snr(float(rho)).linear


@dataclass(frozen=True)
class TagCircuitParams:
    r_tx: float
    x_tx: float
    v_ind_tx: complex
    z_mutual: complex
    noise_var: float

    def __post_init__(self):
        if not self.r_tx > 0:
            raise ValueError("antenna resistance r_tx must be positive")
        if not self.noise_var > 0:
            raise ValueError("noise variance must be positive")

    @property
    def i_pm(self) -> complex:
        """Tag current with a matched load."""
        return complex(self.v_ind_tx) / (2.0 * self.r_tx)


def gamma_from_z(z):
    """Reflection coefficient of a normalized load impedance.

    Works on scalars and arrays.  Non-passive loads (``Re z < 0``) are
    rejected.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.real < -EPS_TOL):
        raise ValueError("load impedance is not passive (Re z < 0)")
    g = (z - 1.0) / (z + 1.0)
    return g[()] if g.ndim == 0 else g


def z_from_gamma(g):
    """Normalized impedance for a reflection coefficient.

    ``gamma = 1`` is the open circuit; it has no finite impedance and raises
    :class:`OpenCircuitError`.
    """
    g = np.asarray(g, dtype=complex)
    if np.any(np.abs(g) > 1.0 + EPS_TOL):
        raise ValueError("reflection coefficient outside the unit disk")
    if np.any(g == 1.0):
        raise OpenCircuitError("gamma = 1 is the open circuit (infinite impedance)")
    z = (1.0 + g) / (1.0 - g)
    return z[()] if z.ndim == 0 else z


def tag_current(g, i_pm: complex):
    g = np.asarray(g, dtype=complex)
    if np.any(np.abs(g) > 1.0 + EPS_TOL):
        raise ValueError("reflection coefficient outside the unit disk")
    i_t = (1.0 - g) * complex(i_pm)
    return i_t[()] if i_t.ndim == 0 else i_t


def link_snr(p: TagCircuitParams) -> Snr:
    """SNR of the tag-to-receiver link, |Z_RT i_PM|^2 / sigma^2."""
    num = abs(p.z_mutual) ** 2 * abs(p.v_ind_tx) ** 2
    return Snr(num / (4.0 * p.r_tx**2 * p.noise_var))
