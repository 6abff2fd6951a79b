"""Extremal index estimation for stationary sequences.

Exceedance always means strictly greater than the threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EstimationError, NoExceedanceError

__all__ = [
    "EiEstimate",
    "armax_sample",
    "blocks_ei",
    "ei_probability_ratio",
    "empirical_threshold",
]

BURN_IN = 1000


@dataclass(frozen=True)
class EiEstimate:
    theta_hat: float
    block_len: int
    threshold: float
    exceedance_count: int

    def __post_init__(self):
        if not 0 < self.theta_hat <= 1:
            raise EstimationError(f"extremal index estimate {self.theta_hat} outside (0, 1]")


def armax_sample(alpha: float, n: int, seed: int, burn_in: int = BURN_IN) -> np.ndarray:
    """Max-autoregressive series X_j = max(alpha X_{j-1}, (1 - alpha) Z_j).

    Z_j are i.i.d. unit Fréchet, so the stationary marginal is unit Fréchet
    too. The first ``burn_in`` steps are discarded. Returned in time order.
    """
    if not 0 < alpha < 1:
        raise DomainError("ARMAX alpha must lie in (0, 1)")
    if n < 1:
        raise DomainError("series length must be positive")
    rng = np.random.default_rng(seed)
    z = -1.0 / np.log(rng.random(n + burn_in + 1))
    innov = ((1.0 - alpha) * z).tolist()
    out = np.empty(n + burn_in)
    x = z[0]
    for j in range(n + burn_in):
        x = max(alpha * x, innov[j + 1])
        out[j] = x
    return out[burn_in:]


def empirical_threshold(series, level: float) -> float:
    """Empirical ``level`` quantile (lower order statistic, no interpolation)."""
    x = np.sort(np.asarray(series, dtype=float))
    if not 0 < level < 1:
        raise DomainError("quantile level must lie in (0, 1)")
    return float(x[min(x.size - 1, max(0, math.ceil(level * x.size) - 1))])


def blocks_ei(series, block_len: int | None = None, threshold: float | None = None) -> EiEstimate:
    """Blocks estimator: blocks holding an exceedance over total exceedances.

    The series is cut into consecutive blocks of ``block_len`` values (the
    last one may be shorter). Defaults: block length floor(sqrt(n)) and the
    empirical 99.5% quantile as threshold.
    """
    x = np.asarray(series, dtype=float)
    n = x.size
    if n < 2:
        raise DomainError("series needs at least two values")
    if block_len is None:
        block_len = math.isqrt(n)
    if block_len < 1:
        raise DomainError("block length must be positive")
    if threshold is None:
        threshold = empirical_threshold(x, 0.995)
    exceed = x > threshold
    count = int(exceed.sum())
    if count == 0:
        raise NoExceedanceError(f"no observation exceeds the threshold {threshold:.6g}")
    starts = np.arange(0, n, block_len)
    blocks_hit = int(np.count_nonzero(np.add.reduceat(exceed.astype(np.int64), starts)))
    theta = min(1.0, blocks_hit / count)
    return EiEstimate(theta, int(block_len), float(threshold), count)


def ei_probability_ratio(series, threshold: float, block_len: int | None = None) -> EiEstimate:
    """Ratio ln P(M_m <= u) / (m ln F(u)) from block maxima and the marginal.

    Both probabilities are empirical: the fraction of disjoint length-m
    blocks whose maximum stays at or below u, and the fraction of single
    values at or below u. By default m = round(-1 / ln F(u)), so each block
    holds about one expected exceedance.
    """
    x = np.asarray(series, dtype=float)
    count = int(np.count_nonzero(x > threshold))
    if count == 0:
        raise NoExceedanceError(f"no observation exceeds the threshold {threshold:.6g}")
    f_u = 1.0 - count / x.size
    if f_u <= 0:
        raise EstimationError("every observation exceeds the threshold")
    if block_len is None:
        block_len = max(1, round(-1.0 / math.log(f_u)))
    nb = x.size // block_len
    if nb < 2:
        raise DomainError("series too short for the requested block length")
    maxima = x[: nb * block_len].reshape(nb, block_len).max(axis=1)
    p_block = float(np.mean(maxima <= threshold))
    if p_block == 0:
        raise EstimationError("every block exceeds the threshold; use a higher threshold")
    theta = math.log(p_block) / (block_len * math.log(f_u))
    return EiEstimate(min(1.0, max(theta, math.ulp(0.0))), int(block_len), float(threshold), count)
