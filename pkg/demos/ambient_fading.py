"""Ambient backscatter: the tag sees a fluctuating illuminating signal.  Averaging
over many ambient symbols per tag symbol removes most of the loss.
"""
from backscatter_capacity.ambient import ergodic_capacity, fading_model, outage_capacity
from backscatter_capacity.capacity import capacity_table

rho = 10.0
c_gp = float(capacity_table()(rho))
print(f"C_GP(10 dB) = {c_gp:.4f}")
for name in ("constant-envelope", "on-off", "circular-gaussian"):
    f = fading_model(name)
    for n_a in (1, 4, 64):
        r = ergodic_capacity(f, n_a, rho, 100_000, seed=1)
        o = outage_capacity(f, n_a, rho, 0.1, 100_000, seed=1)
        print(f"  {name:18s} N_A={n_a:3d}  ergodic {r.rate:.4f} +- {r.stderr:.4f}   10%-outage {o:.4f}")
