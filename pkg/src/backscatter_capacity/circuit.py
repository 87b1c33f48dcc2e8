"""Switched lumped-element tag loads and their joint optimization.

Topology: a fixed series reactance ``x0``, a bank of parallel capacitors
(fixed susceptance ``b0`` plus switched ``b_i``) and a chain of series
resistors ``r_j`` that are shorted when switched off.  All values are
normalized to the antenna resistance, so state ``w`` has impedance

    z_w = j x0 + sum_{on} r_j + 1 / (j (b0 + sum_{on} b_i)).
"""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .core import Snr, as_linear
from .mi import DiscreteConstellation, complex_grid, complex_mi_and_grad, mi_complex_discrete

log = logging.getLogger(__name__)

LOG_BOUNDS = (-18.0, 12.0)
THREADS_ENV = "BACKSCATTER_THREADS"
# optimizer grid spacing in noise std; reported MI uses the finer default
OPT_RESOLUTION = 0.7


@dataclass(frozen=True)
class SwitchedLoadTopology:
    n_caps: int
    n_res: int

    def __post_init__(self):
        if self.n_caps < 0 or self.n_res < 0:
            raise ValueError("component counts must be nonnegative")
        if self.n_caps + self.n_res < 1:
            raise ValueError("at least one switched component is required")

    @property
    def n_switches(self) -> int:
        return self.n_caps + self.n_res

    @property
    def n_states(self) -> int:
        return 2 ** self.n_switches


@dataclass(frozen=True)
class ComponentValues:
    """Normalized susceptances ``caps``, resistances ``res`` and fixed ``b0``, ``x0``."""

    caps: tuple
    res: tuple
    b0: float
    x0: float = 0.0

    def __post_init__(self):
        if any(r < 0 for r in self.res):
            raise ValueError("resistances must be nonnegative")
        if any(b < 0 for b in self.caps) or self.b0 < 0:
            raise ValueError("capacitor susceptances must be nonnegative")
        for v in (*self.caps, *self.res, self.b0, self.x0):
            if not math.isfinite(v):
                raise ValueError("component values must be finite")


def switch_matrix(t: SwitchedLoadTopology) -> np.ndarray:
    """(2^L, L) 0/1 matrix; row ``w`` holds the bits of switch word ``w``.

    Bit ``l`` (least significant first) drives capacitor ``l`` for
    ``l < n_caps`` and resistor ``l - n_caps`` otherwise.
    """
    words = np.arange(t.n_states)[:, None]
    return ((words >> np.arange(t.n_switches)[None, :]) & 1).astype(float)


def _state_impedance_parts(t, caps, res, b0):
    s = switch_matrix(t)
    b_on = b0 + s[:, :t.n_caps] @ np.asarray(caps, dtype=float)
    r_on = s[:, t.n_caps:] @ np.asarray(res, dtype=float)
    return s, b_on, r_on


def state_gammas(t: SwitchedLoadTopology, v: ComponentValues) -> np.ndarray:
    if len(v.caps) != t.n_caps or len(v.res) != t.n_res:
        raise ValueError("component values do not match the topology")
    _, b_on, r_on = _state_impedance_parts(t, v.caps, v.res, v.b0)
    g = np.ones(t.n_states, dtype=complex)
    finite = b_on > 0
    z = 1j * v.x0 + r_on[finite] - 1j / b_on[finite]
    g[finite] = (z - 1.0) / (z + 1.0)
    return g


def enumerate_constellation(t: SwitchedLoadTopology, v: ComponentValues, probs=None) -> DiscreteConstellation:
    """All ``2^L`` reflection coefficients; a state with no capacitance is open (gamma = 1)."""
    return DiscreteConstellation(state_gammas(t, v), probs)


@dataclass(frozen=True)
class CircuitDesign:
    topology: SwitchedLoadTopology
    values: ComponentValues
    probs: np.ndarray
    design_snr: Snr
    mi: float
    converged: bool = True
    seed: int | None = None
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def constellation(self) -> DiscreteConstellation:
        return enumerate_constellation(self.topology, self.values, self.probs)

    def to_dict(self) -> dict:
        g = state_gammas(self.topology, self.values)
        return {
            "topology": {"n_caps": self.topology.n_caps, "n_res": self.topology.n_res},
            "normalized_values": {
                "caps": list(self.values.caps),
                "res": list(self.values.res),
                "b0": self.values.b0,
                "x0": self.values.x0,
            },
            "state_table": [
                {"switch_word": w, "gamma_re": float(gw.real), "gamma_im": float(gw.imag),
                 "prob": float(p)}
                for w, (gw, p) in enumerate(zip(g, self.probs))
            ],
            "mi_bpcu": self.mi,
            "design_snr_db": self.design_snr.db,
            "converged": self.converged,
        }


# parameter vector: [log caps, log res, log b0, x0, logits]
def _unpack(theta, t):
    nc, nr = t.n_caps, t.n_res
    caps = np.exp(theta[:nc])
    res = np.exp(theta[nc:nc + nr])
    b0 = math.exp(theta[nc + nr])
    x0 = theta[nc + nr + 1]
    logits = theta[nc + nr + 2:]
    return caps, res, b0, x0, logits


def _softmax(u):
    e = np.exp(u - u.max())
    return e / e.sum()


def circuit_objective(t: SwitchedLoadTopology, rho, grid=None):
    """Negative MI and its gradient in the log/softmax parameterization."""
    rho = as_linear(rho)
    grid = complex_grid(rho) if grid is None else grid
    nc = t.n_caps

    def fun(theta):
        caps, res, b0, x0, logits = _unpack(theta, t)
        s, b_on, r_on = _state_impedance_parts(t, caps, res, b0)
        z = 1j * x0 + r_on - 1j / b_on
        g = (z - 1.0) / (z + 1.0)
        p = _softmax(logits)
        mi, d_pts, d_q = complex_mi_and_grad(g, p, rho, grid=grid)
        # chain rule through the holomorphic map: dI/dtheta = Re(conj(dI) dGamma/dtheta)
        w = np.conj(d_pts) * 2.0 / (z + 1.0) ** 2
        d_caps = np.real((w * 1j / b_on**2) @ s[:, :nc]) * caps
        d_res = np.real(w @ s[:, nc:]) * res
        d_b0 = np.real(np.sum(w * 1j / b_on**2)) * b0
        d_x0 = np.real(np.sum(w * 1j))
        d_logits = p * (d_q - np.dot(p, d_q))
        grad = np.concatenate([d_caps, d_res, [d_b0, d_x0], d_logits])
        return -mi, -grad

    return fun


def _theta_from(values: ComponentValues, probs):
    lo, hi = LOG_BOUNDS
    clip = lambda a: np.clip(np.log(np.maximum(np.asarray(a, dtype=float), 1e-300)), lo, hi)
    logits = np.log(np.maximum(np.asarray(probs, dtype=float), 1e-300))
    logits = np.clip(logits - logits.max(), -40.0, 0.0)
    return np.concatenate([clip(values.caps), clip(values.res), clip([values.b0]),
                           [values.x0], logits])


def random_values(t: SwitchedLoadTopology, rng: np.random.Generator) -> ComponentValues:
    """Random starting point: binary-weighted capacitors around resonance."""
    scale = math.exp(rng.normal(-0.5, 0.7))
    caps = scale * 2.0 ** np.arange(t.n_caps) * np.exp(rng.normal(0, 0.3, t.n_caps))
    res = math.exp(rng.normal(-1.0, 0.7)) * 2.0 ** np.arange(t.n_res) * np.exp(rng.normal(0, 0.3, t.n_res))
    b0 = scale * math.exp(rng.normal(-0.5, 0.5))
    # center the reactance range on zero
    b_all = b0 + caps.sum() if t.n_caps else b0
    x0 = 0.5 * (1.0 / b0 + 1.0 / b_all) + rng.normal(0, 0.3)
    return ComponentValues(tuple(caps), tuple(res), float(b0), float(x0))


def _run(t, rho, values, probs, grid, max_iter):
    fun = circuit_objective(t, rho, grid)
    theta0 = _theta_from(values, probs)
    n_comp = t.n_switches + 1
    bounds = [LOG_BOUNDS] * n_comp + [(None, None)] + [(-40.0, 40.0)] * t.n_states
    res = optimize.minimize(fun, theta0, jac=True, method="L-BFGS-B", bounds=bounds,
                            options={"maxiter": max_iter, "ftol": 1e-12, "gtol": 1e-8})
    caps, r, b0, x0, logits = _unpack(res.x, t)
    v = ComponentValues(tuple(map(float, caps)), tuple(map(float, r)), float(b0), float(x0))
    return v, _softmax(logits), -float(res.fun), bool(res.success)


def optimize_circuit_from(t: SwitchedLoadTopology, design_snr, values: ComponentValues,
                          probs=None, seed=None, max_iter: int = 800) -> CircuitDesign:
    """Local joint optimization of component values and probabilities."""
    rho = as_linear(design_snr)
    probs = np.full(t.n_states, 1.0 / t.n_states) if probs is None else np.asarray(probs, float)
    grid = complex_grid(rho, OPT_RESOLUTION)
    start_mi = mi_complex_discrete(enumerate_constellation(t, values, probs), rho)
    v, p, _, ok = _run(t, rho, values, probs, grid, max_iter)
    mi = mi_complex_discrete(enumerate_constellation(t, v, p), rho)
    if mi < start_mi:
        v, p, mi, ok = values, probs, start_mi, False
    return CircuitDesign(t, v, p, Snr(rho), mi, ok, seed)


def optimize_circuit(t: SwitchedLoadTopology, design_snr, seed: int = 0,
                     max_iter: int = 800) -> CircuitDesign:
    """One multi-start member: random start drawn from ``seed``, then local search."""
    rng = np.random.default_rng(seed)
    return optimize_circuit_from(t, design_snr, random_values(t, rng), seed=seed,
                                 max_iter=max_iter)


def n_workers() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return 1


def optimize_circuit_multistart(t: SwitchedLoadTopology, design_snr, seeds=range(16),
                                max_iter: int = 800, n_jobs: int | None = None) -> CircuitDesign:
    """Best design over independent seeds."""
    from joblib import Parallel, delayed

    n_jobs = n_workers() if n_jobs is None else n_jobs
    runs = Parallel(n_jobs=n_jobs)(
        delayed(optimize_circuit)(t, design_snr, s, max_iter) for s in seeds)
    for d in runs:
        log.debug("seed %s: %.5f bpcu", d.seed, d.mi)
    return max(runs, key=lambda d: d.mi)


def add_component(d: CircuitDesign, kind: str) -> tuple:
    """Grow a design by one nearly inactive component.

    The new capacitor (or resistor) gets a negligible value so every old
    state splits into two coincident ones with the probability halved; the
    MI is unchanged and the result is a warm start for the larger circuit.
    """
    t, v = d.topology, d.values
    if kind == "cap":
        t2 = SwitchedLoadTopology(t.n_caps + 1, t.n_res)
        v2 = ComponentValues((*v.caps, 1e-6 * max(v.b0, 1e-3)), v.res, v.b0, v.x0)
    elif kind == "res":
        t2 = SwitchedLoadTopology(t.n_caps, t.n_res + 1)
        v2 = ComponentValues(v.caps, (*v.res, 1e-6), v.b0, v.x0)
    else:
        raise ValueError("kind must be 'cap' or 'res'")
    # old word w maps to new words carrying the new bit 0 or 1
    s2 = switch_matrix(t2)
    new_bit = t.n_caps if kind == "cap" else t.n_switches
    bits = np.delete(s2, new_bit, axis=1)
    old_word = (bits * 2 ** np.arange(t.n_switches)).sum(axis=1).astype(int)
    p2 = 0.5 * np.asarray(d.probs)[old_word]
    return t2, v2, p2
