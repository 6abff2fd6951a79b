"""Ordered-sample container and the tail statistics the estimators are built on.

Order statistics follow the usual 1-based convention: ``X_{i:n}`` is the i-th
smallest value, so ``sample.values[n - k - 1]`` is the threshold ``X_{n-k:n}``
for a tail level ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "OrderedSample",
    "check_level",
    "log_excesses",
    "log_excess_moment",
    "ratio_excess_moment",
    "excess_ratios",
    "log_excess_moment_path",
]


@dataclass(frozen=True, eq=False)
class OrderedSample:
    """Ascending-sorted, NaN-free sample of at least ``min_size`` values.

    The values are stored as a read-only float array. Positivity is not
    required here; log-based statistics check it where they need it.
    """

    values: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise DomainError("sample must be one-dimensional")
        if np.isnan(v).any():
            raise DomainError("sample contains NaN")
        if v.size > 1 and np.any(v[1:] < v[:-1]):
            raise DomainError("sample values must be sorted ascending")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def from_data(cls, data, provenance: str = "", min_size: int = 2) -> OrderedSample:
        """Sort arbitrary data into a sample, enforcing a minimum size."""
        v = np.sort(np.asarray(data, dtype=float).ravel())
        if v.size < min_size:
            raise DomainError(f"sample needs at least {min_size} values, got {v.size}")
        return cls(v, provenance)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n

    def order_stat(self, i: int) -> float:
        """X_{i:n} with 1-based ``i``."""
        if not 1 <= i <= self.n:
            raise DomainError(f"order statistic index {i} outside 1..{self.n}")
        return float(self.values[i - 1])

    def top(self, k: int) -> np.ndarray:
        """The k largest values in descending order: X_{n:n}, ..., X_{n-k+1:n}."""
        return self.values[self.n - k :][::-1]

    def threshold(self, k: int) -> float:
        """X_{n-k:n}, the (k+1)-th largest value."""
        check_level(self, k)
        return float(self.values[self.n - k - 1])

    def scaled(self, c: float) -> OrderedSample:
        if c <= 0:
            raise DomainError("scale factor must be positive")
        return OrderedSample(self.values * c, self.provenance)

    def shifted(self, shift: float) -> OrderedSample:
        return OrderedSample(self.values + shift, self.provenance)


def check_level(sample: OrderedSample, k: int) -> int:
    """Validate a tail level 1 <= k < n and return it as an int."""
    if isinstance(k, bool) or int(k) != k:
        raise DomainError(f"tail level must be an integer, got {k!r}")
    k = int(k)
    if not 1 <= k < sample.n:
        raise DomainError(f"tail level k={k} outside 1..{sample.n - 1}")
    return k


def _positive_threshold(sample: OrderedSample, k: int) -> float:
    thr = sample.threshold(k)
    if not thr > 0:
        raise DomainError(
            f"threshold X_(n-k:n) = {thr:.6g} at k={k} is not positive; "
            "log-based statistics need positive data above the threshold"
        )
    return thr


def log_excesses(sample: OrderedSample, k: int) -> np.ndarray:
    """ln X_{n-i+1:n} - ln X_{n-k:n} for i = 1..k (descending)."""
    k = check_level(sample, k)
    thr = _positive_threshold(sample, k)
    return np.log(sample.top(k)) - np.log(thr)


def log_excess_moment(sample: OrderedSample, k: int, p: float = 1.0) -> float:
    """Mean of the p-th powers of the top-k log-excesses.

    ``p = 0`` returns 1 by convention (every term counts as one).
    """
    e = log_excesses(sample, k)
    if p == 0:
        return 1.0
    if p == 1:
        return float(np.mean(e))
    return float(np.mean(e**p))


def ratio_excess_moment(sample: OrderedSample, k: int, p: float = 1.0) -> float:
    """Mean of (1 - X_{n-k:n} / X_{n-i+1:n})^p over the top k values; lies in [0, 1)."""
    if p < 1:
        raise DomainError("ratio excess moment needs p >= 1")
    k = check_level(sample, k)
    thr = _positive_threshold(sample, k)
    return float(np.mean((1.0 - thr / sample.top(k)) ** p))


def excess_ratios(sample: OrderedSample, k: int) -> np.ndarray:
    """U_ik = X_{n-i+1:n} / X_{n-k:n} for i = 1..k, each >= 1 and non-increasing."""
    k = check_level(sample, k)
    thr = _positive_threshold(sample, k)
    return sample.top(k) / thr


def log_excess_moment_path(sample: OrderedSample, ks, p: int = 1) -> np.ndarray:
    """Log-excess moments of integer order ``p`` for several levels at once.

    Order 1 comes from one cumulative sum; higher orders are evaluated level
    by level. Levels whose threshold is nonpositive give NaN instead of
    raising, so sweeps over k stay vectorized.
    """
    ks = np.asarray(ks, dtype=int)
    n = sample.n
    if ks.size and (ks.min() < 1 or ks.max() >= n):
        raise DomainError(f"tail levels must lie in 1..{n - 1}")
    vals = sample.values[::-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(vals > 0, np.log(np.where(vals > 0, vals, 1.0)), np.nan)
    thr = logs[ks]
    if p == 1:
        cs = np.cumsum(logs)
        return cs[ks - 1] / ks - thr
    out = np.empty(ks.size)
    for j, k in enumerate(ks):
        out[j] = np.mean((logs[:k] - thr[j]) ** p)
    return out
