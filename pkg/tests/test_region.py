import math

import pytest
from hypothesis import given, settings, strategies as st

from backscatter_capacity.region import (GammaRegion, ReactanceBandConstraint, constrained_rate_lower_bound,
                                         excluded_area_fraction, full_disk, half_disk, high_snr_rate_loss,
                                         inscribed_square, lens_area, low_snr_rate, mi_uniform_region,
                                         region_area, region_area_mc, region_from_reactance_band)

Q_CAL = 9.989  # calibrated value, re-derived in the acceptance suite


def band_region(delta, q=Q_CAL):
    return region_from_reactance_band(ReactanceBandConstraint(delta, q))


def closed_form_excluded(delta, q):
    lo, hi = ReactanceBandConstraint(delta, q).band
    return (lens_area(lo) + lens_area(hi)) / math.pi


def test_basic_areas():
    assert region_area(full_disk()) == pytest.approx(math.pi, rel=1e-4)
    assert region_area(inscribed_square()) == pytest.approx(2.0, rel=1e-3)
    assert region_area(half_disk()) == pytest.approx(math.pi / 2, rel=1e-4)


def test_rate_loss_examples():
    assert high_snr_rate_loss(full_disk()) == pytest.approx(0.0, abs=1e-4)
    assert high_snr_rate_loss(inscribed_square()) == pytest.approx(math.log2(math.pi / 2), abs=1e-3)
    g = GammaRegion(lambda z: z.real >= -1.0)
    g._area = 0.9615 * math.pi
    assert high_snr_rate_loss(g) == pytest.approx(0.0566, abs=5e-4)
    empty = GammaRegion(lambda z: z.real > 2)
    with pytest.raises(ValueError):
        high_snr_rate_loss(empty)


def test_lower_bound_examples():
    assert constrained_rate_lower_bound(full_disk(), 100.0) == pytest.approx(math.log2(1 + 100 / math.e), abs=1e-3)
    half = half_disk()
    assert constrained_rate_lower_bound(half, math.e) == pytest.approx(math.log2(1.5), abs=1e-4)
    # log2(1 + (2/pi)(100/e)) = log2(24.42) = 4.610
    assert constrained_rate_lower_bound(inscribed_square(), 100.0) == pytest.approx(4.6097, abs=2e-3)


def test_low_snr_rate():
    rho = 0.01
    assert low_snr_rate(full_disk(), rho) == pytest.approx(rho * math.log2(math.e))
    small = GammaRegion(lambda z: abs(z) <= 0.5)
    assert small.d_max == pytest.approx(1.0, abs=0.01)
    assert low_snr_rate(small, rho) == pytest.approx(rho * math.log2(math.e) / 4, rel=0.02)
    for d in (0.05, 0.5):
        assert low_snr_rate(band_region(d), rho) == pytest.approx(rho * math.log2(math.e))


def test_computed_d_max():
    g = GammaRegion(lambda z: z.imag >= 0)  # no d_max hint
    assert g.d_max == pytest.approx(2.0, abs=0.01)


@pytest.mark.parametrize("delta", [0.05, 0.15, 0.25, 0.5])
def test_band_area_vs_closed_form_and_mc(delta):
    g = band_region(delta)
    assert excluded_area_fraction(g) == pytest.approx(closed_form_excluded(delta, Q_CAL), abs=2e-4)
    mc, se = region_area_mc(g, 4 * 10**6, seed=7)
    assert abs(mc - region_area(g)) / region_area(g) < 0.002


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 0.95), st.floats(0.5, 100))
def test_band_region_contains_real_axis(delta, q):
    g = band_region(delta, q)
    assert g.contains(0.0) and g.contains(-1.0) and g.contains(0.999)
    assert g.d_max == 2.0


def test_rate_loss_strictly_decreasing_in_delta():
    losses = [high_snr_rate_loss(band_region(d)) for d in (0.05, 0.15, 0.25, 0.5)]
    assert all(a > b for a, b in zip(losses, losses[1:]))


def test_band_limit_delta_to_one():
    # band -> (-inf, q/2]; only the lens above x = q/2 remains excluded
    q = 4.0
    g = band_region(0.999, q)
    assert excluded_area_fraction(g) == pytest.approx(lens_area(q / 2) / math.pi, abs=5e-4)


@pytest.mark.parametrize("region", [inscribed_square, lambda: band_region(0.15)])
def test_uniform_region_mi_above_bound(region):
    g = region()
    rho = 1000.0
    assert mi_uniform_region(g, rho) >= constrained_rate_lower_bound(g, rho) - 1e-3
