"""Peaks over a random threshold: excesses over an empirical quantile.

Subtracting the empirical quantile X_{n_s:n} makes every estimator applied to
the excesses location invariant, and scale invariance carries over from the
base estimator.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .errors import DomainError
from .estimators import EviEstimate, Method, hill, mixed_moment, moment
from .tail_stats import OrderedSample

__all__ = ["PortBase", "PortConfig", "port_excesses", "port_evi"]


class PortBase(str, enum.Enum):
    HILL = "hill"
    MOMENT = "moment"
    MIXED_MOMENT = "mixed-moment"


_BASES = {
    PortBase.HILL: (hill, Method.PORT_HILL),
    PortBase.MOMENT: (moment, Method.PORT_MOMENT),
    PortBase.MIXED_MOMENT: (mixed_moment, Method.PORT_MIXED_MOMENT),
}


@dataclass(frozen=True)
class PortConfig:
    """Quantile level ``s`` in [0, 1) of the random threshold.

    ``s = 0`` thresholds at the sample minimum, which is only sensible for
    models with a finite left endpoint; estimates made that way carry the
    ``"finite_left_endpoint_assumed"`` flag.
    """

    s: float = 0.1

    def __post_init__(self):
        if not (0.0 <= self.s < 1.0):
            raise DomainError(f"PORT level s must lie in [0, 1), got {self.s}")

    def threshold_index(self, n: int) -> int:
        """n_s = floor(n s) + 1 (1-based order statistic index)."""
        return math.floor(n * self.s) + 1

    @property
    def flags(self) -> tuple[str, ...]:
        return ("finite_left_endpoint_assumed",) if self.s == 0 else ()


def port_excesses(sample: OrderedSample, cfg: PortConfig = PortConfig()) -> OrderedSample:
    """Ascending excesses X_{j:n} - X_{n_s:n} for j = n_s+1..n (length n - n_s)."""
    n = sample.n
    ns = cfg.threshold_index(n)
    if ns >= n:
        raise DomainError(f"n_s={ns} leaves no excesses for n={n}")
    v = sample.values
    # Subtraction is monotone in floating point, so the result stays sorted.
    return OrderedSample(v[ns:] - v[ns - 1], f"port(s={cfg.s}) of {sample.provenance}".strip())


def port_evi(
    sample: OrderedSample,
    cfg: PortConfig,
    k: int,
    base: PortBase | str = PortBase.HILL,
) -> EviEstimate:
    """Apply Hill, Moment or Mixed-Moment to the PORT excesses at level k.

    k must be below n - n_s. Ties of the top values with the threshold give
    zero excesses, which the base estimator then rejects if it needs
    positive data.
    """
    base = PortBase(base)
    exc = port_excesses(sample, cfg)
    if not 1 <= k < exc.n:
        raise DomainError(f"k={k} must lie in 1..{exc.n - 1} for the PORT excess sample")
    fn, tag = _BASES[base]
    est = fn(exc, k)
    return replace(est, method=tag, flags=est.flags + cfg.flags)
