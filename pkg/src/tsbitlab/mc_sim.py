"""Monte-Carlo replay of Thompson sampling with a Beta prior.

Each step draws x_t ~ Beta(O+1, Z+1), predicts 1 iff x_t > q, and pays q
for a false positive or 1 - q for a false negative.  Samples are
continuous, so the strict threshold needs no tie rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beta_math import BetaParams, beta_cdf_array
from .prediction import TradeoffParameter, as_sequence

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Seed of substream ``index`` under master ``seed``."""
    return splitmix64((seed & _MASK) ^ splitmix64(index))


def sample_beta_int(a: int, b: int, rng: np.random.Generator, size=None):
    """Draw from Beta(a, b) for integer a, b >= 1."""
    if a < 1 or b < 1 or int(a) != a or int(b) != b:
        raise ValueError(f"need integer a, b >= 1, got ({a}, {b})")
    return rng.beta(a, b, size=size)


@dataclass(frozen=True)
class EpisodeResult:
    realized_loss: float
    error_positions: tuple
    seed: int


def run_episode(seq, q, seed: int) -> EpisodeResult:
    """Play one episode; ``error_positions`` are 1-based time steps."""
    seq = as_sequence(seq)
    q = TradeoffParameter.parse(q)
    x_q = q.real
    rng = np.random.default_rng(seed)
    O = Z = 0
    loss = 0.0
    errors = []
    for t, bit in enumerate(seq, start=1):
        guess = 1 if sample_beta_int(O + 1, Z + 1, rng) > x_q else 0
        if guess != bit:
            errors.append(t)
            loss += x_q if bit == 0 else 1.0 - x_q
        if bit:
            O += 1
        else:
            Z += 1
    return EpisodeResult(realized_loss=loss, error_positions=tuple(errors), seed=seed)


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    stderr: float
    trials: int


def _chunk_losses(seq, x_q: float, n: int, rng: np.random.Generator) -> np.ndarray:
    loss = np.zeros(n)
    for t in range(seq.T):
        bit = seq.bits[t]
        x = sample_beta_int(int(seq.ones[t]) + 1, int(seq.zeros[t]) + 1, rng, size=n)
        if bit:
            loss += np.where(x > x_q, 0.0, 1.0 - x_q)
        else:
            loss += np.where(x > x_q, x_q, 0.0)
    return loss


def monte_carlo(seq, q, trials: int, seed: int = 0, chunk: int = 8192) -> MonteCarloEstimate:
    """Mean and standard error of the realized loss over ``trials`` episodes.

    Episodes are simulated in chunks; chunk i draws from a generator seeded
    with ``derive_seed(seed, i)``, so results depend only on (seed, trials,
    chunk) and chunks may be evaluated in any order.
    """
    if trials < 2:
        raise ValueError("need at least two trials")
    seq = as_sequence(seq)
    x_q = TradeoffParameter.parse(q).real
    count = 0
    mean = 0.0
    m2 = 0.0
    for i, start in enumerate(range(0, trials, chunk)):
        n = min(chunk, trials - start)
        rng = np.random.default_rng(derive_seed(seed, i))
        losses = _chunk_losses(seq, x_q, n, rng)
        c_mean = float(losses.mean())
        c_m2 = float(((losses - c_mean) ** 2).sum())
        # Chan et al. pairwise merge
        delta = c_mean - mean
        total = count + n
        mean += delta * n / total
        m2 += c_m2 + delta * delta * count * n / total
        count = total
    var = m2 / (count - 1)
    return MonteCarloEstimate(mean=mean, stderr=math.sqrt(var / count), trials=count)


def ks_statistic(a: int, b: int, draws: int, seed: int = 0) -> float:
    """One-sample KS distance between sample_beta_int(a, b) draws and beta_cdf."""
    rng = np.random.default_rng(seed)
    x = np.sort(sample_beta_int(a, b, rng, size=draws))
    f = beta_cdf_array(BetaParams(a, b), x)
    n = x.size
    hi = np.arange(1, n + 1) / n - f
    lo = f - np.arange(0, n) / n
    return float(max(hi.max(), lo.max()))
