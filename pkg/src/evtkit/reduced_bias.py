"""Second-order parameter estimation and the bias-corrected Hill estimator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EstimationError
from .estimators import EviEstimate, Method, hill, hill_path
from .tail_stats import OrderedSample, check_level

__all__ = [
    "SecondOrderEstimate",
    "estimate_second_order",
    "rho_statistic",
    "beta_statistic",
    "mvrb_hill",
    "mvrb_path",
    "mvrb_factor",
]

RHO_CLAMP = -1e-6
RHO_BAND = (0.8, 0.9)
RHO_BAND_LEVELS = 15
BETA_EXPONENT = 0.995
MIN_POSITIVE = 10


@dataclass(frozen=True)
class SecondOrderEstimate:
    """Estimated (rho, beta) of A(t) = xi * beta * t^rho.

    ``rho_levels`` lists the tail levels whose rho estimates were pooled;
    ``k_high`` is the level used for beta.
    """

    rho_hat: float
    beta_hat: float
    k_high: int
    rho_levels: tuple[int, ...] = ()
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if not (math.isfinite(self.rho_hat) and math.isfinite(self.beta_hat)):
            raise EstimationError("second-order estimates must be finite")
        if not self.rho_hat < 0:
            raise EstimationError(f"rho estimate must be negative, got {self.rho_hat}")


def _desc_logs(sample: OrderedSample, count: int) -> np.ndarray:
    top = sample.values[sample.n - count :][::-1]
    return np.log(top)


def rho_statistic(sample: OrderedSample, k: int) -> float:
    """Moment-ratio rho estimate at level k with tuning exponent tau = 0.

    T = (ln M1 - ln(M2/2)/2) / (ln(M2/2)/2 - ln(M3/6)/3) and
    rho = -|3 (T - 1) / (T - 3)|. Returns NaN when T is undefined.
    """
    k = check_level(sample, k)
    thr = sample.threshold(k)
    if not thr > 0:
        return math.nan
    e = _desc_logs(sample, k) - math.log(thr)
    m1, m2, m3 = e.mean(), (e * e).mean(), (e**3).mean()
    if not (m1 > 0 and m2 > 0 and m3 > 0):
        return math.nan
    num = math.log(m1) - 0.5 * math.log(m2 / 2.0)
    den = 0.5 * math.log(m2 / 2.0) - math.log(m3 / 6.0) / 3.0
    if den == 0:
        return math.nan
    t = num / den
    if t == 3:
        return math.nan
    return -abs(3.0 * (t - 1.0) / (t - 3.0))


def beta_statistic(sample: OrderedSample, k: int, rho: float) -> float:
    """Scale estimate of the second-order term at level k given rho.

    With U_i = i (ln X_{n-i+1:n} - ln X_{n-i:n}), d(a) = mean((i/k)^-a) and
    D(a) = mean((i/k)^-a U_i):
    beta = (k/n)^rho (d(rho) D(0) - D(rho)) / (d(rho) D(rho) - D(2 rho)).
    """
    k = check_level(sample, k)
    if not sample.threshold(k) > 0:
        raise DomainError(f"threshold at k={k} is not positive")
    lx = _desc_logs(sample, k + 1)
    i = np.arange(1, k + 1, dtype=float)
    spacings = i * (lx[:-1] - lx[1:])
    w = i / k

    def d_weighted(a: float) -> float:
        return float(np.mean(w ** (-a) * spacings))

    d_rho = float(np.mean(w ** (-rho)))
    denom = d_rho * d_weighted(rho) - d_weighted(2.0 * rho)
    if denom == 0:
        return math.nan
    return (k / sample.n) ** rho * (d_rho * d_weighted(0.0) - d_weighted(rho)) / denom


def _default_rho_levels(n: int, n_pos: int) -> np.ndarray:
    cap = min(n - 1, n_pos - 1)
    lo = min(int(n_pos ** RHO_BAND[0]), cap)
    hi = min(int(n_pos ** RHO_BAND[1]), cap)
    lo = max(lo, 2)
    hi = max(hi, lo)
    return np.unique(np.geomspace(lo, hi, RHO_BAND_LEVELS).astype(int))


def estimate_second_order(sample: OrderedSample, k_high: int | None = None) -> SecondOrderEstimate:
    """Estimate (rho, beta) from the upper tail of a heavy-tailed sample.

    By default rho is the median of the tau = 0 moment-ratio estimates over
    15 log-spaced levels between n+^0.8 and n+^0.9, where n+ counts the
    positive observations, and beta is taken at k = n+^0.995 (capped at
    n+ - 1). Passing ``k_high`` estimates both at that single level instead.

    A nonnegative rho estimate is clamped to -1e-6 and flagged
    ``"rho_clamped"``.
    """
    n = sample.n
    n_pos = int(np.count_nonzero(sample.values > 0))
    if n_pos < MIN_POSITIVE:
        raise EstimationError(
            f"only {n_pos} positive observations; at least {MIN_POSITIVE} are needed"
        )
    cap = min(n - 1, n_pos - 1)
    if k_high is None:
        levels = _default_rho_levels(n, n_pos)
        kb = min(int(n_pos**BETA_EXPONENT), cap)
    else:
        kb = check_level(sample, k_high)
        if kb > cap:
            raise DomainError(f"k_high={kb} reaches nonpositive data (at most {cap} allowed)")
        levels = np.array([kb])
    rhos = np.array([rho_statistic(sample, int(k)) for k in levels])
    ok = np.isfinite(rhos)
    if not ok.any():
        raise EstimationError("rho estimate undefined at every candidate level (degenerate tail)")
    rho = float(np.median(rhos[ok]))
    flags: tuple[str, ...] = ()
    if not rho < 0:
        rho = RHO_CLAMP
        flags = ("rho_clamped",)
    beta = beta_statistic(sample, kb, rho)
    if not math.isfinite(beta):
        raise EstimationError(f"beta estimate undefined at k={kb}")
    return SecondOrderEstimate(
        rho, float(beta), kb, tuple(int(k) for k in levels[ok]), flags
    )


def mvrb_factor(n: int, k, so: SecondOrderEstimate):
    """Correction factor 1 - beta (n/k)^rho / (1 - rho)."""
    k = np.asarray(k, dtype=float)
    return 1.0 - so.beta_hat * (n / k) ** so.rho_hat / (1.0 - so.rho_hat)


def mvrb_hill(sample: OrderedSample, k: int, so: SecondOrderEstimate) -> EviEstimate:
    """Hill estimate with its leading bias term removed."""
    h = hill(sample, k)
    value = h.value * float(mvrb_factor(sample.n, h.k, so))
    return EviEstimate(Method.MVRB, h.k, value, flags=so.flags)


def mvrb_path(sample: OrderedSample, so: SecondOrderEstimate, ks=None) -> np.ndarray:
    if ks is None:
        ks = np.arange(1, sample.n)
    ks = np.asarray(ks, dtype=int)
    return hill_path(sample, ks) * mvrb_factor(sample.n, ks, so)
