"""Capacity of the unit-disk AWGN channel for the four load classes.

* general passive load: optimal DAUIP law, found by a warm-started SNR sweep
  that adds circles on trial;
* purely reactive load: uniform phase on the unit circle (no free parameters);
* purely resistive load: discrete real input on [-1, 1], found by the same
  sweep heuristic over sign-symmetric point pairs;
* uniform signaling on the disk (not a capacity, but a useful reference).

:func:`capacity_table` provides a cached interpolation table of the general
capacity curve for Monte Carlo users such as the ambient-fading module.
"""
from __future__ import annotations

import csv
import functools
import logging
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Union

import numpy as np
from scipy import optimize

from .core import Snr, as_linear
from .mi import (LOG2E, DauipDistribution, RealConstellation, dauip_mi_and_grad,
                 radius_rule, rate_uniform_disk_mi, real_grid,
                 symmetric_real_mi_and_grad)

log = logging.getLogger(__name__)

K1_THRESHOLD_RHO = 3.011  # K = 1 is optimal below this SNR (about 4.8 dB)
KEEP_PPM = 1e-6


@dataclass
class CapacityPoint:
    snr: Snr
    rate: float
    input_law: Union[DauipDistribution, RealConstellation, str]
    converged: bool = True
    message: str = ""

    @property
    def k(self) -> int:
        law = self.input_law
        if isinstance(law, DauipDistribution):
            return law.k
        if isinstance(law, RealConstellation):
            return len(law)
        return 0


@dataclass
class SweepConfig:
    snr_db_start: float
    snr_db_end: float
    step_db: float = 0.1
    ppm_keep_threshold: float = KEEP_PPM
    trial_prob_fraction: float = 0.01

    def __post_init__(self):
        if not self.step_db > 0:
            raise ValueError("step_db must be positive")
        if self.snr_db_start > self.snr_db_end:
            raise ValueError("snr_db_start must not exceed snr_db_end")

    def grid(self) -> np.ndarray:
        n = int(round((self.snr_db_end - self.snr_db_start) / self.step_db))
        pts = self.snr_db_start + self.step_db * np.arange(n + 1)
        if pts[-1] < self.snr_db_end - 1e-9:
            pts = np.append(pts, self.snr_db_end)
        return np.round(pts, 10)


def bounds(rho) -> dict:
    """Closed-form bounds and asymptotes of the capacity curves (bpcu)."""
    rho = as_linear(rho)
    return {
        "awgn": math.log2(1.0 + rho),
        "linear": rho * LOG2E,
        "complex_epi": math.log2(1.0 + rho / math.e),
        "real_epi": 0.5 * math.log2(1.0 + 4.0 * rho / (math.pi * math.e)),
        "real_awgn": 0.5 * math.log2(1.0 + 2.0 * rho),
        "reactive_high_snr": 0.5 * math.log2(4.0 * math.pi * rho / math.e),
        "uniform_disk_low_snr": 0.5 * rho * LOG2E,
    }


# ---------------------------------------------------------------------------
# shared inner optimizer


@dataclass
class _MixtureResult:
    mi: float
    coords_sq: np.ndarray
    probs: np.ndarray
    converged: bool
    message: str
    nit: int


def _softmax(z):
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def _optimize_mixture(objective: Callable, coords_sq, probs, max_iter: int = 3000):
    """Maximize a mixture MI over squared coordinates (first one fixed) and probs.

    ``objective(coords_sq, probs)`` returns ``(mi, d_coords_sq, d_probs)``.
    Squared coordinates live in [0, 1] (L-BFGS-B box); probabilities use a
    softmax parameterization.
    """
    s0 = np.asarray(coords_sq, dtype=float)
    p0 = np.clip(np.asarray(probs, dtype=float), 1e-300, None)
    k = s0.size
    x0 = np.concatenate([s0[1:], np.log(p0 / p0.max())])

    def unpack(x):
        s = np.concatenate([s0[:1], np.clip(x[:k - 1], 0.0, 1.0)])
        return s, _softmax(x[k - 1:])

    def fun(x):
        s, p = unpack(x)
        mi, d_s, d_p = objective(s, p)
        d_z = p * (d_p - np.dot(p, d_p))
        return -mi, -np.concatenate([d_s[1:], d_z])

    bnds = [(0.0, 1.0)] * (k - 1) + [(-60.0, 60.0)] * k
    res = optimize.minimize(fun, x0, jac=True, method="L-BFGS-B", bounds=bnds,
                            options={"maxiter": max_iter, "ftol": 1e-14,
                                     "gtol": 1e-11, "maxcor": 30})
    s, p = unpack(res.x)
    mi0 = objective(s0, p0 / p0.sum())[0]
    if -res.fun < mi0:  # never return something worse than the start
        s, p, mi = s0, p0 / p0.sum(), mi0
    else:
        mi = -res.fun
    ok = bool(res.success) or "ABNORMAL" in str(res.message)
    return _MixtureResult(float(mi), s, p, ok, str(res.message), int(res.nit))


def _sweep_step(objective, coords_sq, probs, keep_ppm, trial_frac):
    """One sweep step: re-optimize at fixed size, then try one more component."""
    base = _optimize_mixture(objective, coords_sq, probs)
    p_trial = np.append(base.probs, trial_frac * base.probs[0])
    p_trial /= p_trial.sum()
    trial = _optimize_mixture(objective, np.append(base.coords_sq, 0.0), p_trial)
    if trial.mi - base.mi >= keep_ppm * abs(base.mi):
        return trial, True
    return base, False


def _prune(coords_sq, probs, tol=1e-7, p_min=1e-12):
    """Merge coincident components and drop vanished ones (first kept)."""
    cs, ps = [coords_sq[0]], [probs[0]]
    for c, p in zip(coords_sq[1:], probs[1:]):
        if p < p_min:
            continue
        for i, c2 in enumerate(cs):
            if abs(math.sqrt(c) - math.sqrt(c2)) < tol:
                ps[i] += p
                break
        else:
            cs.append(c)
            ps.append(p)
    ps = np.array(ps)
    return np.array(cs), ps / ps.sum()


# ---------------------------------------------------------------------------
# general passive load


def _dauip_objective(rho):
    nodes = radius_rule(rho)
    return lambda s, p: dauip_mi_and_grad(s, p, rho, nodes=nodes)


def capacity_reactive(rho) -> CapacityPoint:
    """Capacity with a purely reactive load: uniform phase on the unit circle."""
    rho = as_linear(rho)
    law = DauipDistribution((1.0,), (1.0,))
    mi, _, _ = dauip_mi_and_grad(np.ones(1), np.ones(1), rho, want_grad=False)
    return CapacityPoint(Snr(rho), float(mi), law)


def capacity_general_sweep(cfg: SweepConfig, on_point: Callable = None) -> list:
    """Warm-started capacity sweep for the general passive load.

    At each grid SNR the previous optimum is re-optimized at fixed K, then a
    circle at the origin with probability ``trial_prob_fraction * p_1`` is
    added on trial and kept when it raises the rate by at least
    ``ppm_keep_threshold`` (relative).
    """
    if cfg.snr_db_start > 10 * math.log10(K1_THRESHOLD_RHO):
        raise ValueError("the sweep must start where K = 1 is optimal (<= 4.8 dB)")
    s, p = np.ones(1), np.ones(1)
    out, prev_rate = [], 0.0
    for db in cfg.grid():
        rho = 10.0 ** (db / 10.0)
        obj = _dauip_objective(rho)
        res, _ = _sweep_step(obj, s, p, cfg.ppm_keep_threshold, cfg.trial_prob_fraction)
        if not res.converged:
            log.warning("inner optimizer did not converge at %.2f dB: %s", db, res.message)
        s, p = _prune(res.coords_sq, res.probs)
        point = _general_point(rho, res, s, p)
        if point.k == 1:
            s, p = np.ones(1), np.ones(1)
        if point.rate < prev_rate:
            log.debug("rate decreased at %.2f dB by %.2e", db, prev_rate - point.rate)
        prev_rate = point.rate
        out.append(point)
        if on_point is not None:
            on_point(point)
    return out


class _SweepCache:
    """Sweep state on a fixed 0.1 dB grid, extended on demand.

    Off-grid SNRs are warm-started from the closest grid point below.
    """

    def __init__(self, start_db: float, objective_factory, to_point, step_db: float = 0.1):
        self.start_db = start_db
        self.step_db = step_db
        self.objective_factory = objective_factory
        self.to_point = to_point
        self.states = []  # (coords_sq, probs, CapacityPoint) per grid index

    def _grid_db(self, i):
        return round(self.start_db + i * self.step_db, 10)

    def _advance(self):
        if self.states:
            s, p, _ = self.states[-1]
        else:
            s, p = np.ones(1), np.ones(1)
        rho = 10.0 ** (self._grid_db(len(self.states)) / 10.0)
        res, _ = _sweep_step(self.objective_factory(rho), s, p, KEEP_PPM, 0.01)
        s, p = _prune(res.coords_sq, res.probs)
        self.states.append((s, p, self.to_point(rho, res, s, p)))

    def at(self, rho) -> CapacityPoint:
        db = 10.0 * math.log10(rho)
        i = int(math.floor((db - self.start_db) / self.step_db + 1e-9))
        if i < 0:
            s, p = np.ones(1), np.ones(1)
        else:
            while len(self.states) <= i:
                self._advance()
            s, p, point = self.states[i]
            if abs(self._grid_db(i) - db) < 1e-9:
                return point
        res, _ = _sweep_step(self.objective_factory(rho), s, p, KEEP_PPM, 0.01)
        s, p = _prune(res.coords_sq, res.probs)
        return self.to_point(rho, res, s, p)


def _general_point(rho, res, s, p):
    react = capacity_reactive(rho)
    if res.mi < react.rate:
        return react
    return CapacityPoint(Snr(rho), res.mi, DauipDistribution.from_arrays(np.sqrt(s), p),
                         res.converged, res.message)


_GENERAL_CACHE = _SweepCache(4.0, _dauip_objective, _general_point)


def capacity_general(rho) -> CapacityPoint:
    """General passive load capacity at one SNR.

    Below 4 dB the K = 1 law is optimal and the reactive result is returned;
    above, a cached 0.1 dB sweep starting at 4 dB is extended as needed.
    """
    rho = as_linear(rho)
    if rho < 10 ** 0.4:
        return capacity_reactive(rho)
    return _GENERAL_CACHE.at(rho)


def optimize_dauip(rho, law: DauipDistribution) -> CapacityPoint:
    """Locally optimize radii and probabilities of a DAUIP law at fixed K."""
    rho = as_linear(rho)
    res = _optimize_mixture(_dauip_objective(rho), np.square(law.radii), law.probs)
    return CapacityPoint(Snr(rho), res.mi,
                         DauipDistribution.from_arrays(np.sqrt(res.coords_sq), res.probs,
                                                       merge_tol=0.0),
                         res.converged, res.message)


def dauip_fixed_k(rho, k: int, trial_prob_fraction: float = 0.01) -> CapacityPoint:
    """Best DAUIP law with exactly ``k`` circles near the capacity optimum.

    Starts from :func:`capacity_general`; circles are added at the origin or
    the least likely ones removed until ``k`` remain, then re-optimized.
    """
    rho = as_linear(rho)
    if k < 1:
        raise ValueError("k must be positive")
    base = capacity_general(rho)
    s = np.square(base.input_law.radii)
    p = np.asarray(base.input_law.probs)
    obj = _dauip_objective(rho)
    while s.size > k:
        drop = 1 + int(np.argmin(p[1:]))
        s, p = np.delete(s, drop), np.delete(p, drop)
        res = _optimize_mixture(obj, s, p / p.sum())
        s, p = res.coords_sq, res.probs
    while s.size < k:
        p = np.append(p, trial_prob_fraction * p[0])
        res = _optimize_mixture(obj, np.append(s, 0.0), p / p.sum())
        s, p = res.coords_sq, res.probs
    res = _optimize_mixture(obj, s, p)
    order = np.argsort(-res.coords_sq, kind="stable")
    radii = np.sqrt(res.coords_sq[order])
    probs = res.probs[order]
    # keep exactly k circles: separate coincident radii minimally
    for i in range(1, radii.size):
        if radii[i] >= radii[i - 1]:
            radii[i] = max(0.0, radii[i - 1] - 1e-9)
    radii[0] = 1.0
    law = DauipDistribution(tuple(radii), tuple(probs / probs.sum()))
    return CapacityPoint(Snr(rho), res.mi, law, res.converged, res.message)


# ---------------------------------------------------------------------------
# purely resistive load


def _resistive_objective(rho):
    grid = real_grid(rho)
    return lambda s, p: symmetric_real_mi_and_grad(s, p, rho, grid=grid)


def _real_law(s, p) -> RealConstellation:
    t = np.sqrt(s)
    pts, probs = [], []
    for ti, pi in zip(t, p):
        if ti < 1e-7:
            pts.append(0.0)
            probs.append(pi)
        else:
            pts += [ti, -ti]
            probs += [pi / 2, pi / 2]
    order = np.argsort(pts)
    pts, probs = np.asarray(pts)[order], np.asarray(probs)[order]
    return RealConstellation(pts, probs / probs.sum())


def capacity_resistive_sweep(cfg: SweepConfig) -> list:
    """Warm-started sweep for the purely resistive (real-input) capacity.

    The input is kept sign symmetric and always contains +-1; pairs are
    added at the origin on trial with the same keep rule as the circle sweep.
    """
    s, p = np.ones(1), np.ones(1)
    out = []
    for db in cfg.grid():
        rho = 10.0 ** (db / 10.0)
        res, _ = _sweep_step(_resistive_objective(rho), s, p, cfg.ppm_keep_threshold,
                             cfg.trial_prob_fraction)
        s, p = _prune(res.coords_sq, res.probs)
        out.append(_resistive_point(rho, res, s, p))
    return out


def _resistive_point(rho, res, s, p):
    return CapacityPoint(Snr(rho), res.mi, _real_law(s, p), res.converged, res.message)


_RESISTIVE_CACHE = _SweepCache(-10.0, _resistive_objective, _resistive_point)


def capacity_resistive(rho) -> CapacityPoint:
    """Capacity of a purely resistive load (real input on [-1, 1]).

    Uses a cached sweep on a 0.1 dB grid from -10 dB, where the
    equiprobable input on +-1 is optimal.
    """
    return _RESISTIVE_CACHE.at(as_linear(rho))


# ---------------------------------------------------------------------------
# uniform disk


def rate_uniform_disk(rho) -> CapacityPoint:
    rho = as_linear(rho)
    return CapacityPoint(Snr(rho), rate_uniform_disk_mi(rho), "uniform-disk")


# ---------------------------------------------------------------------------
# interpolation table


@dataclass(frozen=True)
class CapacityTable:
    """General-load capacity on a dB grid, linearly interpolated in dB.

    Below the grid the low-SNR asymptote ``rho log2 e`` is used; above it the
    high-SNR asymptote ``log2(1 + rho/e)`` shifted to match the last entry.
    """

    snr_db: np.ndarray
    rate: np.ndarray
    k: np.ndarray = field(default=None)

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        out = np.zeros_like(rho)
        pos = rho > 0
        db = np.full_like(rho, -np.inf)
        db[pos] = 10.0 * np.log10(rho[pos])
        lo, hi = self.snr_db[0], self.snr_db[-1]
        inside = pos & (db >= lo) & (db <= hi)
        out[inside] = np.interp(db[inside], self.snr_db, self.rate)
        below = pos & (db < lo)
        out[below] = rho[below] * LOG2E
        above = db > hi
        if np.any(above):
            rho_hi = 10.0 ** (hi / 10.0)
            shift = self.rate[-1] - math.log2(1.0 + rho_hi / math.e)
            out[above] = np.log2(1.0 + rho[above] / math.e) + shift
        return out[()] if out.ndim == 0 else out

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["snr_db", "rate_bpcu", "k"])
            for db, r, k in zip(self.snr_db, self.rate, self.k):
                w.writerow([f"{db:.1f}", f"{r:.12f}", int(k)])

    @classmethod
    def from_csv(cls, path_or_file):
        if isinstance(path_or_file, (str, os.PathLike)):
            with open(path_or_file) as fh:
                return cls.from_csv(fh)
        rows = list(csv.DictReader(l for l in path_or_file if not l.startswith("#")))
        return cls(np.array([float(r["snr_db"]) for r in rows]),
                   np.array([float(r["rate_bpcu"]) for r in rows]),
                   np.array([int(r["k"]) for r in rows]))


def build_capacity_table(db_lo: float = -30.0, db_hi: float = 35.0,
                         step_db: float = 0.1) -> CapacityTable:
    """Compute the table: reactive capacity below 0 dB, the sweep above."""
    sweep_start = min(0.0, db_hi)
    low = np.round(np.arange(db_lo, sweep_start, step_db), 10)
    dbs, rates, ks = [], [], []
    for db in low:
        dbs.append(db)
        rates.append(capacity_reactive(10 ** (db / 10)).rate)
        ks.append(1)
    for pt in capacity_general_sweep(SweepConfig(sweep_start, db_hi, step_db)):
        dbs.append(round(pt.snr.db, 10))
        rates.append(pt.rate)
        ks.append(pt.k)
    return CapacityTable(np.array(dbs), np.array(rates), np.array(ks))


@functools.lru_cache(maxsize=1)
def capacity_table() -> CapacityTable:
    """The shipped general-capacity table (-30 dB to 35 dB, 0.1 dB grid)."""
    ref = resources.files("backscatter_capacity") / "data" / "capacity_general.csv"
    with ref.open("r") as fh:
        return CapacityTable.from_csv(fh)
