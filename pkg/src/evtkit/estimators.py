"""Classical extreme-value-index estimators and Gumbel's model-choice statistic."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma

from .errors import DomainError, EstimatorOverflowError, SingularityError
from .tail_stats import (
    OrderedSample,
    check_level,
    excess_ratios,
    log_excess_moment,
    log_excess_moment_path,
    ratio_excess_moment,
)

__all__ = [
    "Method",
    "EviEstimate",
    "hill",
    "moment",
    "mixed_moment",
    "power_mean_evi",
    "mean_order_p_evi",
    "gumbel_statistic",
    "hill_path",
    "mean_order_p_path",
]


class Method(str, enum.Enum):
    HILL = "hill"
    MOMENT = "moment"
    MIXED_MOMENT = "mixed-moment"
    POWER_MEAN = "pme"
    MEAN_ORDER_P = "mop"
    GUMBEL_W = "gumbel-w"
    GJ = "gj-hill"
    MVRB = "mvrb"
    PORT_HILL = "port-hill"
    PORT_MOMENT = "port-moment"
    PORT_MIXED_MOMENT = "port-mixed-moment"


@dataclass(frozen=True)
class EviEstimate:
    """Point estimate of the extreme value index at tail level ``k``.

    ``variance`` stays ``None``: no variance proxy is computed by any
    estimator here. ``flags`` carries advisory notes such as a violated
    validity condition.
    """

    method: Method
    k: int
    value: float
    p: float | None = None
    variance: float | None = None
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise EstimatorOverflowError(f"{self.method.value} estimate at k={self.k} is not finite")
        if self.k < 1:
            raise DomainError("tail level must be positive")


def hill(sample: OrderedSample, k: int) -> EviEstimate:
    """Hill estimator: mean log-excess over the (k+1)-th largest value."""
    k = check_level(sample, k)
    return EviEstimate(Method.HILL, k, log_excess_moment(sample, k, 1))


def moment(sample: OrderedSample, k: int) -> EviEstimate:
    """Moment estimator M1 + 1 - 1 / (2 (1 - M1^2 / M2))."""
    k = check_level(sample, k)
    m1 = log_excess_moment(sample, k, 1)
    m2 = log_excess_moment(sample, k, 2)
    if m2 == 0:
        raise SingularityError(f"second log-excess moment vanishes at k={k}")
    denom = 1.0 - m1 * m1 / m2
    if denom == 0:
        raise SingularityError(f"moment estimator is singular at k={k} (M1^2 = M2)")
    return EviEstimate(Method.MOMENT, k, m1 + 1.0 - 0.5 / denom)


def mixed_moment(sample: OrderedSample, k: int) -> EviEstimate:
    """Mixed-moment estimator built from M1 and the ratio moment L1."""
    k = check_level(sample, k)
    m1 = log_excess_moment(sample, k, 1)
    l1 = ratio_excess_moment(sample, k, 1)
    if l1 == 0:
        raise SingularityError(f"ratio moment vanishes at k={k}")
    phi = (m1 - l1) / (l1 * l1)
    return EviEstimate(Method.MIXED_MOMENT, k, mixed_moment_from_phi(phi))


def mixed_moment_from_phi(phi: float) -> float:
    d = phi - 1.0
    return d / (1.0 + 2.0 * min(d, 0.0))


def power_mean_evi(sample: OrderedSample, k: int, p: float) -> EviEstimate:
    """(M^(p) / Gamma(p + 1))^(1/p); identical to Hill at p = 1."""
    if not p > 0:
        raise DomainError("power-mean exponent p must be positive")
    k = check_level(sample, k)
    if p == 1:
        value = log_excess_moment(sample, k, 1)
    else:
        value = (log_excess_moment(sample, k, p) / gamma(p + 1.0)) ** (1.0 / p)
    return EviEstimate(Method.POWER_MEAN, k, float(value), p=float(p))


def mean_order_p_evi(sample: OrderedSample, k: int, p: float) -> EviEstimate:
    """Mean-of-order-p estimator (1 - 1 / mean(U_ik^p)) / p, Hill at p = 0.

    Estimates with p >= 1/H(k) carry the ``"p_beyond_validity"`` flag; the
    condition involves the unknown index so it is not enforced.
    """
    k = check_level(sample, k)
    h = log_excess_moment(sample, k, 1)
    if p == 0:
        return EviEstimate(Method.MEAN_ORDER_P, k, h, p=0.0)
    with np.errstate(over="ignore"):
        mean_up = float(np.mean(excess_ratios(sample, k) ** p))
    if not math.isfinite(mean_up) or mean_up == 0:
        raise EstimatorOverflowError(f"mean of U^p is not finite for p={p} at k={k}")
    value = (1.0 - 1.0 / mean_up) / p
    flags = ("p_beyond_validity",) if h > 0 and p >= 1.0 / h else ()
    return EviEstimate(Method.MEAN_ORDER_P, k, value, p=float(p), flags=flags)


def gumbel_statistic(sample: OrderedSample) -> float:
    """W = (X_{n:n} - X_{m:n}) / (X_{m:n} - X_{1:n}) with m = floor(n/2) + 1."""
    n = sample.n
    if n < 3:
        raise DomainError("Gumbel statistic needs n >= 3")
    mid = sample.order_stat(n // 2 + 1)
    denom = mid - sample.order_stat(1)
    if denom == 0:
        raise SingularityError("lower half of the sample is degenerate")
    return (sample.order_stat(n) - mid) / denom


def hill_path(sample: OrderedSample, ks=None) -> np.ndarray:
    """Hill estimates for many levels at once (default k = 1..n-1).

    Levels with a nonpositive threshold come back as NaN.
    """
    if ks is None:
        ks = np.arange(1, sample.n)
    return log_excess_moment_path(sample, ks, 1)


def mean_order_p_path(sample: OrderedSample, p: float, ks=None) -> np.ndarray:
    """Vectorized :func:`mean_order_p_evi` values; NaN where undefined."""
    if ks is None:
        ks = np.arange(1, sample.n)
    ks = np.asarray(ks, dtype=int)
    if p == 0:
        return hill_path(sample, ks)
    desc = sample.values[::-1]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # U_ik^p = X_i^p / X_thr^p; cumulative sums of X^p give all k at once.
        pos = desc > 0
        xp = np.where(pos, desc, np.nan) ** p
        cs = np.cumsum(xp)
        mean_up = cs[ks - 1] / ks / xp[ks]
        out = (1.0 - 1.0 / mean_up) / p
    return np.where(np.isfinite(out), out, np.nan)
