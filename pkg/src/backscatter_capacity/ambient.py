"""Ergodic and outage rates of ambient backscatter via the combined-gain law."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .capacity import capacity_table
from .core import as_linear

BATCH = 1 << 16


@dataclass(frozen=True)
class FadingModel:
    """Sampler ``(rng, shape) -> complex array`` with unit mean power."""

    name: str
    sampler: Callable

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        return np.asarray(self.sampler(rng, shape), dtype=complex)


def _constant_envelope(rng, shape):
    return np.exp(2j * math.pi * rng.random(shape))


def _circular_gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def _on_off(rng, shape):
    # amplitude 0 or sqrt(2) with equal probability, random phase
    amp = math.sqrt(2.0) * (rng.random(shape) < 0.5)
    return amp * np.exp(2j * math.pi * rng.random(shape))


PRESETS = {
    "constant-envelope": FadingModel("constant-envelope", _constant_envelope),
    "circular-gaussian": FadingModel("circular-gaussian", _circular_gaussian),
    "on-off": FadingModel("on-off", _on_off),
}


def fading_model(name: str) -> FadingModel:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown fading model {name!r}; choose from {sorted(PRESETS)}") from None


def _check(f, n_ambient):
    if not isinstance(f, FadingModel):
        raise TypeError("expected a FadingModel")
    if int(n_ambient) != n_ambient or n_ambient < 1:
        raise ValueError("n_ambient must be a positive integer")


def combined_gain_samples(f: FadingModel, n_ambient: int, n_samples: int, seed: int) -> np.ndarray:
    """``a = ||psi|| / sqrt(N_A)`` for ``n_samples`` independent symbols.

    Batches draw from child streams of one ``SeedSequence`` so the output
    depends only on ``seed``.
    """
    _check(f, n_ambient)
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    n_batches = -(-n_samples // BATCH)
    children = np.random.SeedSequence(seed).spawn(n_batches)
    out = np.empty(n_samples)
    for i, ss in enumerate(children):
        m = min(BATCH, n_samples - i * BATCH)
        psi = f.sample(np.random.default_rng(ss), (m, n_ambient))
        out[i * BATCH:i * BATCH + m] = np.sqrt(np.sum(np.abs(psi) ** 2, axis=1) / n_ambient)
    return out


@dataclass(frozen=True)
class ErgodicRate:
    rate: float
    stderr: float


def ergodic_capacity(f: FadingModel, n_ambient: int, rho, n_samples: int = 10**5,
                     seed: int = 0, table=None) -> ErgodicRate:
    """Mean of ``C_GP(a^2 rho)`` over the combined-gain law."""
    rho = as_linear(rho)
    table = capacity_table() if table is None else table
    a = combined_gain_samples(f, n_ambient, n_samples, seed)
    c = table(a * a * rho)
    # math.fsum keeps the mean independent of summation order
    mean = math.fsum(c) / c.size
    sd = float(np.std(c, ddof=1)) if c.size > 1 else 0.0
    return ErgodicRate(mean, sd / math.sqrt(c.size))


def outage_capacity(f: FadingModel, n_ambient: int, rho, epsilon, n_samples: int = 10**5,
                    seed: int = 0, table=None):
    """``C_GP(rho * F^{-1}(eps))`` with the empirical quantile of ``a^2``.

    ``epsilon`` may be a scalar or a sequence.
    """
    rho = as_linear(rho)
    eps = np.asarray(epsilon, dtype=float)
    if np.any((eps <= 0) | (eps >= 1)):
        raise ValueError("epsilon must lie in (0, 1)")
    table = capacity_table() if table is None else table
    a = combined_gain_samples(f, n_ambient, n_samples, seed)
    if a.size == 0:
        raise ValueError("empty sample set")
    q = np.quantile(a * a, eps, method="inverted_cdf")
    out = table(rho * np.asarray(q))
    return float(out) if np.ndim(out) == 0 else out
