"""How much rate an inductive tag loses when its tuning capacitor can only
vary within +-delta of resonance.
"""
from backscatter_capacity.region import (ReactanceBandConstraint, calibrate_q_factor,
                                         constrained_rate_lower_bound, excluded_area_fraction,
                                         high_snr_rate_loss, low_snr_rate, region_from_reactance_band)

q = calibrate_q_factor(delta=0.05, target_excluded=0.612)
print(f"coil Q giving 61.2% exclusion at delta = 5%: {q:.3f}")
for delta in (0.05, 0.15, 0.25, 0.5):
    g = region_from_reactance_band(ReactanceBandConstraint(delta, q))
    print(f"delta {delta:4.2f}: excluded {100 * excluded_area_fraction(g):5.2f}%  "
          f"high-SNR loss {high_snr_rate_loss(g):.4f} bpcu  "
          f"bound at 30 dB {constrained_rate_lower_bound(g, 1000.0):.3f}  "
          f"low-SNR rate at -20 dB {low_snr_rate(g, 0.01):.5f}")
