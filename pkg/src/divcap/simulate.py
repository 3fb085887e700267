"""Seeded Monte-Carlo estimator of diversity-combiner capacity.

Draws per-branch envelopes, forms the post-combining SNR, and averages the
instantaneous capacity W*log2(1 + gamma_end).  Sampling is organized in
fixed-size blocks, each fed by its own counter-based random stream keyed by
(seed, block index), so the estimate is bit-identical however the blocks are
scheduled across processes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .capacity import CapacityPoint, CombinerSpec
from .fading import FadingModel

__all__ = ["SimConfig", "SimResult", "combiner_snr", "simulate_capacity"]

_LN2 = math.log(2.0)


def combiner_snr(envelopes, comb: CombinerSpec):
    """Post-combining SNR for one or many draws of the branch envelopes.

    Parameters
    ----------
    envelopes : array_like
        Nonnegative envelope values with shape ``(..., L)``; the last axis
        runs over the branches.
    comb : CombinerSpec
        Combiner whose gain and exponents apply.

    Returns
    -------
    float or ndarray
        ``(phi * sum_l R_l**p)**q`` for every leading index; a scalar when
        a single draw is passed.
    """
    r = np.asarray(envelopes, dtype=float)
    if r.ndim == 0 or r.shape[-1] != comb.L:
        raise ValueError(f"expected {comb.L} envelope values on the last axis")
    if np.any(r < 0.0):
        raise ValueError("envelopes must be nonnegative")
    out = (comb.phi * np.sum(r**comb.p, axis=-1)) ** comb.q
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SimConfig:
    """Inputs of one Monte-Carlo run.

    ``models`` may be a single fading model (replicated across branches) or
    a sequence of exactly ``comb.L`` models.  ``batch`` is the number of
    samples drawn per random stream; it defaults to ``n_samples`` (one
    block) and must divide ``n_samples``.
    """

    models: Union[FadingModel, Sequence[FadingModel]]
    comb: CombinerSpec
    n_samples: int = 10000
    seed: int = 0
    batch: Optional[int] = None

    def __post_init__(self):
        models = self.models
        if isinstance(models, FadingModel):
            models = (models,) * self.comb.L
        else:
            models = tuple(models)
        if len(models) != self.comb.L:
            raise ValueError(f"need {self.comb.L} branch models, got {len(models)}")
        object.__setattr__(self, "models", models)
        n = self.n_samples
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 100:
            raise ValueError("n_samples must be an integer >= 100")
        object.__setattr__(self, "n_samples", int(n))
        seed = self.seed
        if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
            raise ValueError("seed must be an integer")
        if not 0 <= seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        object.__setattr__(self, "seed", int(seed))
        batch = self.batch if self.batch is not None else n
        if (not isinstance(batch, (int, np.integer)) or isinstance(batch, bool)
                or batch < 1 or n % batch):
            raise ValueError("batch must be a positive integer dividing n_samples")
        object.__setattr__(self, "batch", int(batch))


@dataclass(frozen=True)
class SimResult:
    """Sample mean of the instantaneous capacity and its standard error."""

    mean: float
    std_error: float
    n_samples: int

    def as_point(self) -> CapacityPoint:
        """View the estimate as a capacity point."""
        return CapacityPoint(self.mean, "monte-carlo", self.std_error)


def _block_sums(cfg: SimConfig, block: int) -> tuple:
    """Sum and sum-of-squares of log2(1 + gamma_end) over one block."""
    rng = np.random.Generator(np.random.Philox(key=[cfg.seed, block]))
    draws = np.empty((cfg.batch, cfg.comb.L))
    for j, model in enumerate(cfg.models):
        draws[:, j] = model.sample(rng, cfg.batch)
    bits = np.log1p(combiner_snr(draws, cfg.comb)) / _LN2
    return float(np.sum(bits)), float(np.sum(bits * bits))


def simulate_capacity(cfg: SimConfig) -> SimResult:
    """Estimate the mean capacity W*log2(1 + gamma_end) by Monte Carlo.

    Each block of ``cfg.batch`` draws comes from an independent stream keyed
    by ``(cfg.seed, block index)`` and block partials are combined in index
    order, so the result does not depend on how blocks are scheduled.

    Parameters
    ----------
    cfg : SimConfig
        Run description; see the dataclass for field semantics.

    Returns
    -------
    SimResult
        Mean in bits/s/Hz with ``std_error = sample_std / sqrt(n_samples)``.

    Raises
    ------
    NotImplementedError
        If any branch model has no sampling routine.
    """
    n_blocks = cfg.n_samples // cfg.batch
    partial = np.empty((n_blocks, 2))
    for b in range(n_blocks):
        partial[b] = _block_sums(cfg, b)
    total, total_sq = (float(v) for v in np.sum(partial, axis=0))
    n = cfg.n_samples
    mean = total / n
    var = max(0.0, (total_sq - n * mean * mean) / (n - 1.0))
    w = cfg.comb.bandwidth
    return SimResult(mean=w * mean, std_error=w * math.sqrt(var / n), n_samples=n)
