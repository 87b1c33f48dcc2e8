"""Scalar special functions used by the mutual-information integrals."""
from __future__ import annotations

import numpy as np
from scipy import special, stats


def bessel_i0e(x):
    """Exponentially scaled modified Bessel function ``I0(x) * exp(-x)``.

    Evaluated directly in scaled form so that large arguments neither
    overflow nor lose precision.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("bessel_i0e is defined here for x >= 0 only")
    out = special.i0e(x)
    return out[()] if out.ndim == 0 else out


def bessel_ratio_over_x(x):
    """``I1(x) / (x * I0(x))`` with the removable singularity at 0 filled in."""
    x = np.asarray(x, dtype=float)
    small = x < 1e-4
    xs = np.where(small, 1.0, x)
    out = np.where(small, 0.5 - x * x / 16.0, special.i1e(xs) / (xs * special.i0e(xs)))
    return out[()] if out.ndim == 0 else out


def marcum_q1(a, b):
    """First-order Marcum Q-function Q1(a, b).

    Q1(a, b) is the probability that a Rice variable with unit-variance
    quadrature components and offset ``a`` exceeds ``b``.  It equals the
    survival function of a noncentral chi-square with 2 degrees of freedom
    and noncentrality a^2, evaluated at b^2.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("marcum_q1 arguments must be nonnegative")
    a, b = np.broadcast_arrays(a, b)
    out = np.exp(-0.5 * b * b)
    pos = a > 0
    if np.any(pos):
        out = np.array(out, copy=True)
        # 1 - cdf is exact enough when the cdf is small, and the sf overflows
        # internally for tiny b with large a
        low = special.chndtr(b * b, 2.0, a * a)
        use_cdf = pos & (low < 0.5)
        use_sf = pos & ~use_cdf
        out[use_cdf] = 1.0 - low[use_cdf]
        out[use_sf] = stats.ncx2.sf(b[use_sf] ** 2, 2, a[use_sf] ** 2)
    out = np.clip(out, 0.0, 1.0)
    return out[()] if out.ndim == 0 else out


def marcum_q1_complement(a, b):
    """``1 - Q1(a, b)`` evaluated without cancellation in the lower tail."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("arguments must be nonnegative")
    out = special.chndtr(b * b, 2.0, a * a)
    out = np.clip(out, 0.0, 1.0)
    return out[()] if np.ndim(out) == 0 else out
