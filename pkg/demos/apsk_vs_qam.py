"""Finite constellations against capacity: APSK built from the optimal circles,
ideal PSK, and square QAM.
"""
from scipy.optimize import brentq

from backscatter_capacity.capacity import capacity_general, capacity_reactive
from backscatter_capacity.constellations import design_apsk, design_psk, design_qam
from backscatter_capacity.core import Snr
from backscatter_capacity.mi import mi_complex_discrete

for m, db in [(16, 10), (64, 15), (256, 21)]:
    rho = 10 ** (db / 10)
    apsk = design_apsk(m, Snr.from_db(db))
    qam = design_qam(m)
    print(f"{m}-APSK designed at {db} dB: rings {apsk.ring_sizes}")
    print(f"   MI APSK {mi_complex_discrete(apsk.constellation, rho):.4f}   "
          f"MI QAM {mi_complex_discrete(qam, rho):.4f}   capacity {capacity_general(rho).rate:.4f}")

# express the QAM loss at 21 dB as an SNR shift along the capacity curve
rho = 10 ** 2.1
inv = lambda r: brentq(lambda d: capacity_general(10 ** (d / 10)).rate - r, 5, 21.5, xtol=1e-3)
r_apsk = mi_complex_discrete(design_apsk(256, Snr(rho)).constellation, rho)
r_qam = mi_complex_discrete(design_qam(256), rho)
print(f"\n256-QAM costs {inv(r_apsk) - inv(r_qam):.2f} dB against 256-APSK at 21 dB")

print("\nPSK vs reactive capacity")
for db in (0, 10, 20, 30):
    rho = 10 ** (db / 10)
    print(f"  {db:2d} dB  32-PSK {mi_complex_discrete(design_psk(32), rho):.4f}   "
          f"C_react {capacity_reactive(rho).rate:.4f}")
