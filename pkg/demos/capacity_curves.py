"""Capacity of the three load classes next to the simple bounds.

Run:  python demos/capacity_curves.py
"""
import math

from backscatter_capacity.capacity import (bounds, capacity_general, capacity_reactive,
                                           capacity_resistive, rate_uniform_disk)

print(f"{'SNR dB':>7} {'resist':>8} {'react':>8} {'general':>8} {'K':>3} {'disk':>8} {'log2(1+r/e)':>12}")
for db in range(-10, 26, 5):
    rho = 10 ** (db / 10)
    gen = capacity_general(rho)
    b = bounds(rho)
    print(f"{db:7d} {capacity_resistive(rho).rate:8.4f} {capacity_reactive(rho).rate:8.4f} "
          f"{gen.rate:8.4f} {gen.k:3d} {rate_uniform_disk(rho).rate:8.4f} {b['complex_epi']:12.4f}")

# the optimal law at 20 dB: a few concentric circles with uniform phase
law = capacity_general(100.0).input_law
print("\ncircles at 20 dB (radius, probability):")
for a, p in zip(law.radii, law.probs):
    print(f"  {a:.4f}  {p:.4f}")

# high SNR: reactive vs resistive differ by about half of log2(pi^2)
rho = 1000.0
gap = capacity_reactive(rho).rate - capacity_resistive(rho).rate
print(f"\nreactive - resistive at 30 dB: {gap:.3f} bpcu (0.5*log2(pi^2) = {0.5 * math.log2(math.pi**2):.3f})")
