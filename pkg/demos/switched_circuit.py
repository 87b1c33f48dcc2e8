"""A tag load of switched capacitors and resistors, tuned for 20 dB.

Takes a few minutes on one core.  Set BACKSCATTER_THREADS to run the
multi-start seeds in parallel.
"""
import numpy as np

from backscatter_capacity.capacity import capacity_table
from backscatter_capacity.circuit import SwitchedLoadTopology, optimize_circuit_multistart
from backscatter_capacity.mi import mi_complex_discrete, source_entropy

for n_caps, n_res in [(5, 0), (5, 3)]:
    t = SwitchedLoadTopology(n_caps, n_res)
    d = optimize_circuit_multistart(t, 100.0, seeds=range(8))
    print(f"{n_caps} caps + {n_res} res: MI {d.mi:.4f} bpcu at 20 dB, H = {source_entropy(d.probs):.3f} bits")
    print("   caps", np.round(d.values.caps, 4), " res", np.round(d.values.res, 4),
          f" b0 {d.values.b0:.4f} x0 {d.values.x0:.4f}")
    for db in (10, 30):
        rho = 10 ** (db / 10)
        print(f"   at {db} dB: {mi_complex_discrete(d.constellation, rho):.4f}"
              f"  (capacity {float(capacity_table()(rho)):.4f})")
