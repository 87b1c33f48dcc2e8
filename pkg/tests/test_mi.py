import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from backscatter_capacity.mi import (DauipDistribution, DiscreteConstellation, RealConstellation,
                                     complex_mi_and_grad, dauip_mi_and_grad, mi_complex_discrete,
                                     mi_dauip, mi_real_discrete, mi_uip, radius_pdf_dauip,
                                     radius_pdf_uniform_disk, rate_uniform_disk_mi, real_grid, source_entropy,
                                     symmetric_real_mi_and_grad)
from backscatter_capacity.constellations import design_psk, design_qam

LOG2E = 1.0 / math.log(2.0)


# --- oracles ---------------------------------------------------------------

def mp_mi_circle(rho, a=1.0):
    """MI of a uniform-phase circle from the Rice density, in mpmath."""
    rho = mpmath.mpf(rho)

    def f(b):
        return 2 * rho * b * mpmath.exp(-rho * (b * b + a * a)) * mpmath.besseli(0, 2 * rho * a * b)

    def g(b):
        v = f(b)
        return v * mpmath.log(v / b) if v > 0 else 0

    hi = 1 + 10 / mpmath.sqrt(rho)
    s = 1 / mpmath.sqrt(2 * rho)
    val = mpmath.quad(g, [0, max(a - 4 * s, 0), a, a + 4 * s, hi])
    return float((mpmath.log(2 * rho / mpmath.e) - val) / mpmath.log(2))


def bpsk_real_mi(snr_1d):
    """Binary antipodal +-1 in N(0, 1/snr_1d): 1 - E log2(1 + exp(-2 snr_1d (1 + n)))."""
    sig = 1.0 / math.sqrt(snr_1d)

    def integrand(n):
        pdf = math.exp(-n * n / (2 * sig * sig)) / (sig * math.sqrt(2 * math.pi))
        return pdf * np.logaddexp(0.0, -2 * snr_1d * (1 + n)) * LOG2E

    val, _ = integrate.quad(integrand, -12 * sig, 12 * sig, limit=200)
    return 1.0 - val


def mc_mi(c, rho, n=200_000, seed=1):
    """Plain Monte Carlo E[log2 p(y|x)/p(y)] for a complex constellation."""
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(c), size=n, p=c.probs)
    w = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2 * rho)
    y = c.points[idx] + w
    d2 = np.abs(y[:, None] - c.points[None, :]) ** 2
    log_mix = np.log(np.sum(c.probs[None, :] * np.exp(-rho * (d2 - np.abs(w)[:, None] ** 2)), axis=1))
    vals = -log_mix * LOG2E
    return vals.mean(), vals.std() / math.sqrt(n)


# --- types -----------------------------------------------------------------

def test_dauip_validation():
    with pytest.raises(ValueError):
        DauipDistribution((0.9,), (1.0,))
    with pytest.raises(ValueError):
        DauipDistribution((1.0, 0.5), (0.5, 0.4))
    with pytest.raises(ValueError):
        DauipDistribution((1.0, 0.5, 0.6), (0.4, 0.3, 0.3))
    d = DauipDistribution.from_arrays([0.3, 1.0, 0.3 + 1e-9], [0.2, 0.5, 0.3])
    assert d.radii == (1.0, pytest.approx(0.3))
    assert d.probs == (0.5, pytest.approx(0.5))


def test_constellation_validation():
    with pytest.raises(ValueError):
        DiscreteConstellation([1.2])
    with pytest.raises(ValueError):
        DiscreteConstellation([1, -1], [0.7, 0.7])
    with pytest.raises(ValueError):
        RealConstellation([0.5, -0.5])


def test_source_entropy():
    assert source_entropy([0.5, 0.5]) == pytest.approx(1.0)
    assert source_entropy([1.0, 0.0]) == 0.0
    assert source_entropy(np.full(64, 1 / 64)) == pytest.approx(6.0)


# --- densities ---------------------------------------------------------------

@pytest.mark.parametrize("rho", [0.1, 1.0, 100.0, 1000.0])
def test_radius_densities_normalized(rho):
    d = DauipDistribution((1.0, 0.6, 0.0), (0.5, 0.3, 0.2))
    hi = 1 + 10 / math.sqrt(rho)
    v1, _ = integrate.quad(lambda b: radius_pdf_dauip(b, d, rho), 0, hi, points=[0.6, 1.0], limit=200)
    v2, _ = integrate.quad(lambda b: radius_pdf_uniform_disk(b, rho), 0, hi, points=[1.0], limit=200)
    assert v1 == pytest.approx(1.0, abs=1e-8)
    assert v2 == pytest.approx(1.0, abs=1e-8)


def test_rice_density_origin_circle_is_rayleigh():
    rho = 3.0
    d = DauipDistribution((1.0, 0.0), (1e-12, 1 - 1e-12))
    b = np.linspace(0.01, 2, 9)
    assert np.allclose(radius_pdf_dauip(b, d, rho), 2 * rho * b * np.exp(-rho * b * b), rtol=1e-9)


# --- UIP / DAUIP MI ----------------------------------------------------------

@pytest.mark.parametrize("db", [-10, 0, 10, 20, 30])
def test_circle_mi_vs_mpmath(db):
    rho = 10 ** (db / 10)
    ref = mp_mi_circle(rho)
    d = DauipDistribution((1.0,), (1.0,))
    assert mi_dauip(d, rho) == pytest.approx(ref, abs=1e-9)
    assert mi_uip(lambda b: radius_pdf_dauip(b, d, rho), rho) == pytest.approx(ref, abs=1e-8)


def test_uniform_disk_vs_grid_convolution():
    from backscatter_capacity.region import full_disk, mi_uniform_region
    for rho in (10.0, 1000.0):
        assert rate_uniform_disk_mi(rho) == pytest.approx(mi_uniform_region(full_disk(), rho), abs=5e-4)


def test_dauip_gradient_fd():
    rho = 50.0
    s = np.array([1.0, 0.36, 0.04, 0.0])
    p = np.array([0.4, 0.3, 0.2, 0.1])
    _, ds, dp = dauip_mi_and_grad(s, p, rho)
    h = 1e-6
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        lo = np.clip(s - e, 0, None)
        fd_s = (dauip_mi_and_grad(s + e, p, rho, want_grad=False)[0]
                - dauip_mi_and_grad(lo, p, rho, want_grad=False)[0]) / (s + e - lo)[k]
        fd_p = (dauip_mi_and_grad(s, p + e, rho, want_grad=False)[0]
                - dauip_mi_and_grad(s, p - e, rho, want_grad=False)[0]) / (2 * h)
        assert ds[k] == pytest.approx(fd_s, rel=1e-4, abs=1e-7)
        assert dp[k] == pytest.approx(fd_p, rel=1e-4)


# --- finite constellations -------------------------------------------------

def test_single_point_zero():
    assert mi_complex_discrete(DiscreteConstellation([0.3j]), 100.0) == 0.0


@pytest.mark.parametrize("db", [-5, 0, 5, 10])
def test_bpsk_complex_equals_real_oracle(db):
    rho = 10 ** (db / 10)
    # only the real noise component matters: variance 1/(2 rho)
    ref = bpsk_real_mi(2 * rho)
    assert mi_complex_discrete(DiscreteConstellation([1, -1]), rho) == pytest.approx(ref, abs=1e-7)
    assert mi_real_discrete(RealConstellation([-1, 1]), rho) == pytest.approx(ref, abs=1e-7)


def test_qam16_vs_monte_carlo():
    c = design_qam(16)
    rho = 10.0
    est, se = mc_mi(c, rho)
    assert mi_complex_discrete(c, rho) == pytest.approx(est, abs=4 * se)


def test_grid_resolution_converged():
    c = DiscreteConstellation(np.exp(1j * np.linspace(0, 2, 7)) * np.linspace(0.2, 1, 7),
                              np.arange(1, 8) / 28)
    a = mi_complex_discrete(c, 100.0)
    b = mi_complex_discrete(c, 100.0, resolution=0.15)
    assert a == pytest.approx(b, abs=1e-8)


def test_dense_psk_approaches_circle():
    rho = 10.0
    circle = mi_dauip(DauipDistribution((1.0,), (1.0,)), rho)
    assert mi_complex_discrete(design_psk(256), rho) == pytest.approx(circle, abs=1e-6)


@pytest.mark.parametrize("db,ref", [(20, 4.4149), (30, 4.9995)])
def test_psk32_reference(db, ref):
    assert mi_complex_discrete(design_psk(32), 10 ** (db / 10)) == pytest.approx(ref, abs=0.005)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 16), st.floats(0, 2 * math.pi), st.floats(-5, 20))
def test_rotation_invariance_and_bounds(m, phase, db):
    rho = 10 ** (db / 10)
    c = design_psk(m)
    mi = mi_complex_discrete(c, rho)
    assert mi_complex_discrete(c.rotated(phase), rho) == pytest.approx(mi, abs=1e-7)
    assert 0 <= mi <= min(math.log2(m), math.log2(1 + rho)) + 1e-12


def test_complex_gradient_fd():
    rng = np.random.default_rng(3)
    pts = 0.8 * rng.uniform(-0.7, 0.7, 6) + 0.8j * rng.uniform(-0.7, 0.7, 6)
    q = rng.dirichlet(np.ones(6))
    rho = 30.0
    _, dz, dq = complex_mi_and_grad(pts, q, rho)
    f = lambda z, p: complex_mi_and_grad(z, p, rho, want_grad=False)[0]
    h = 1e-6
    for k in range(6):
        e = np.zeros(6)
        e[k] = h
        fd_re = (f(pts + e, q) - f(pts - e, q)) / (2 * h)
        fd_im = (f(pts + 1j * e, q) - f(pts - 1j * e, q)) / (2 * h)
        fd_q = (f(pts, q + e) - f(pts, q - e)) / (2 * h)
        assert dz[k].real == pytest.approx(fd_re, rel=1e-4, abs=1e-8)
        assert dz[k].imag == pytest.approx(fd_im, rel=1e-4, abs=1e-8)
        assert dq[k] == pytest.approx(fd_q, rel=1e-4)


def test_symmetric_real_matches_explicit():
    rho = 20.0
    s = np.array([1.0, 0.25])
    p = np.array([0.7, 0.3])
    mi, ds, dp = symmetric_real_mi_and_grad(s, p, rho, grid=real_grid(rho, 0.3))
    c = RealConstellation([-1, -0.5, 0.5, 1], [0.35, 0.15, 0.15, 0.35])
    assert mi == pytest.approx(mi_real_discrete(c, rho), abs=1e-10)
    h = 1e-6
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        f = lambda a, b: symmetric_real_mi_and_grad(a, b, rho, want_grad=False)[0]
        assert ds[k] == pytest.approx((f(s + e, p) - f(s - e, p)) / (2 * h), rel=1e-4)
        assert dp[k] == pytest.approx((f(s, p + e) - f(s, p - e)) / (2 * h), rel=1e-4)
