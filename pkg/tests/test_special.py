import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from backscatter_capacity.special import (bessel_i0e, bessel_ratio_over_x, marcum_q1,
                                          marcum_q1_complement)


def mp_q1(a, b):
    # Q1(a, b) = 1 - int_0^b x exp(-(x^2 + a^2)/2) I0(a x) dx
    f = lambda x: x * mpmath.exp(-(x * x + a * a) / 2) * mpmath.besseli(0, a * x)
    return 1 - mpmath.quad(f, [0, b])


@pytest.mark.parametrize("x", [0.0, 1e-8, 0.3, 5.0, 80.0, 1e4])
def test_i0e_vs_mpmath(x):
    ref = mpmath.besseli(0, x) * mpmath.exp(-x)
    assert bessel_i0e(x) == pytest.approx(float(ref), rel=1e-13)


def test_i0e_negative_rejected():
    with pytest.raises(ValueError):
        bessel_i0e(-1.0)


@pytest.mark.parametrize("x", [0.0, 1e-6, 1e-3, 0.5, 3.0, 40.0])
def test_ratio_vs_mpmath(x):
    ref = 0.5 if x == 0 else float(mpmath.besseli(1, x) / (x * mpmath.besseli(0, x)))
    assert bessel_ratio_over_x(x) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("a,b", [(0.0, 1.0), (1.0, 1.0), (2.0, 0.5), (3.0, 4.0), (0.5, 3.0)])
def test_marcum_vs_quadrature(a, b):
    ref = float(mp_q1(a, b))
    assert marcum_q1(a, b) == pytest.approx(ref, abs=1e-12)
    assert marcum_q1_complement(a, b) == pytest.approx(1 - ref, abs=1e-12)


def test_marcum_complement_lower_tail():
    # deep lower tail: 1 - Q1 is tiny and must not cancel to 0
    ref = float(1 - mp_q1(10.0, 1.0))
    assert marcum_q1_complement(10.0, 1.0) == pytest.approx(ref, rel=1e-8)


@settings(max_examples=200)
@given(st.floats(0, 20), st.floats(0, 20))
def test_marcum_bounds(a, b):
    q = marcum_q1(a, b)
    assert 0.0 <= q <= 1.0
    assert q + marcum_q1_complement(a, b) == pytest.approx(1.0, abs=1e-12)


def test_marcum_tiny_b_large_a():
    # the noncentral chi-square sf overflows internally here
    assert marcum_q1(19.0, 1.2e-38) == 1.0
    assert marcum_q1(19.0, 1e-8) == 1.0
    ref = float(mp_q1(19.0, 18.0))
    assert marcum_q1(19.0, 18.0) == pytest.approx(ref, abs=1e-12)
