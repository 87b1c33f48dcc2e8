"""Capacity and information rates of backscatter load modulation.

The channel is ``y = gamma + w`` with gamma in the closed unit disk and
complex Gaussian noise of variance ``1/rho``.
"""
from .core import EPS_TOL, OpenCircuitError, Snr, TagCircuitParams, gamma_from_z, link_snr, z_from_gamma
from .mi import (DauipDistribution, DiscreteConstellation, RealConstellation, mi_complex_discrete,
                 mi_dauip, mi_real_discrete, source_entropy)
from .capacity import (CapacityPoint, SweepConfig, bounds, capacity_general, capacity_general_sweep,
                       capacity_reactive, capacity_resistive, capacity_table, rate_uniform_disk)

__version__ = "0.1.0"
