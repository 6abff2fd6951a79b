"""Jackknife bias reduction and double-bootstrap selection of the tail level."""

from __future__ import annotations

import enum
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EstimationError, SelectionError, SingularityError
from .estimators import EviEstimate, Method, hill, hill_path, mean_order_p_evi, mean_order_p_path
from .reduced_bias import SecondOrderEstimate, estimate_second_order, mvrb_hill, mvrb_path
from .tail_stats import OrderedSample, check_level

__all__ = [
    "jackknife_pseudo_values",
    "pure_jackknife",
    "generalized_jackknife",
    "gj_hill",
    "BootstrapTarget",
    "BootstrapPlan",
    "BootstrapResult",
    "bootstrap_osf",
    "auxiliary_path",
    "replicate_rng",
]

Statistic = Callable[[np.ndarray], float]

FLAT_MSE = 1e-20


def _as_array(data) -> np.ndarray:
    if isinstance(data, OrderedSample):
        return data.values
    return np.asarray(data, dtype=float)


def _leave_one_out(statistic: Statistic, x: np.ndarray) -> np.ndarray:
    n = x.size
    if n < 2:
        raise DomainError("jackknife needs at least two observations")
    return np.array([statistic(np.delete(x, i)) for i in range(n)], dtype=float)


def jackknife_pseudo_values(statistic: Statistic, data) -> np.ndarray:
    """Pseudo-values n T_n - (n - 1) T_{n,-i}, one per left-out observation."""
    x = _as_array(data)
    loo = _leave_one_out(statistic, x)
    n = x.size
    return n * statistic(x) - (n - 1) * loo


def pure_jackknife(statistic: Statistic, data) -> float:
    """n T_n - (n - 1) mean(T_{n,-i}); removes a bias term of order 1/n."""
    x = _as_array(data)
    loo = _leave_one_out(statistic, x)
    n = x.size
    return float(n * statistic(x) - (n - 1) * np.mean(loo))


def generalized_jackknife(t1: float, t2: float, alpha: float) -> float:
    """(t1 - alpha t2) / (1 - alpha)."""
    if alpha == 1:
        raise SingularityError("generalized jackknife is undefined for alpha = 1")
    return (t1 - alpha * t2) / (1.0 - alpha)


def gj_hill(sample: OrderedSample, k: int, rho_hat: float) -> EviEstimate:
    """Generalized jackknife of Hill at levels k and floor(k/2), alpha = 2^-rho."""
    if not rho_hat < 0:
        raise DomainError("rho_hat must be negative")
    k = check_level(sample, k)
    if k < 2:
        raise DomainError("GJ Hill needs k >= 2")
    alpha = 2.0 ** (-rho_hat)
    value = generalized_jackknife(hill(sample, k).value, hill(sample, k // 2).value, alpha)
    return EviEstimate(Method.GJ, k, value)


class BootstrapTarget(str, enum.Enum):
    HILL = "hill"
    MOP = "mop"
    MVRB = "mvrb"


@dataclass(frozen=True)
class BootstrapPlan:
    """Sub-sample sizes n1 > n2, replicate count and seed for the double bootstrap."""

    n1: int
    n2: int
    replicates: int = 250
    seed: int = 0

    def __post_init__(self):
        if self.replicates < 100:
            raise DomainError("bootstrap needs at least 100 replicates")
        if not 1 < self.n2 < self.n1:
            raise DomainError(f"need 1 < n2 < n1, got n1={self.n1}, n2={self.n2}")

    @classmethod
    def default(cls, n: int, seed: int, replicates: int = 250) -> BootstrapPlan:
        """n1 = floor(n^0.955), n2 = floor(n1^2 / n)."""
        n1 = int(math.floor(n**0.955))
        return cls(n1, n1 * n1 // n, replicates, seed)

    def validate_for(self, n: int) -> None:
        if not self.n1 < n:
            raise DomainError(f"n1={self.n1} must be smaller than the sample size {n}")
        if self.n2 < 4:
            raise DomainError("n2 is too small to compare two tail levels")


@dataclass(frozen=True)
class BootstrapResult:
    """Selected level ``k_hat`` with the sub-sample minimizers and MSE curves.

    ``diagnostics`` maps ``"n1"``/``"n2"`` to ``(ks, mse)`` arrays.
    """

    k_hat: int
    k1_star: int
    k2_star: int
    c_factor: float
    estimate: EviEstimate
    rho_hat: float | None = None
    diagnostics: dict = field(default_factory=dict, compare=False)


def replicate_rng(seed: int, stage: int, b: int) -> np.random.Generator:
    """Independent stream for replicate ``b`` of sub-sample stage ``stage``.

    Streams depend only on (seed, stage, b), so replicates can run in any
    order or in parallel.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stage, b)))


def auxiliary_path(path: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Differences T(floor(k/2)) - T(k) for k = 2..m-1 from a path over k = 1..m-1."""
    m = path.size + 1
    ks = np.arange(2, m)
    return ks, path[ks // 2 - 1] - path[ks - 1]


def _path_fn(target: BootstrapTarget, p: float, so: SecondOrderEstimate | None):
    if target is BootstrapTarget.HILL:
        return hill_path
    if target is BootstrapTarget.MOP:
        return lambda s: mean_order_p_path(s, p)
    return lambda s: mvrb_path(s, so)


def _c_factor(target: BootstrapTarget, rho: float | None) -> float:
    if rho is None:
        return 1.0
    r = 2.0 * rho if target is BootstrapTarget.MVRB else rho
    return (1.0 - 2.0**r) ** (2.0 / (1.0 - 2.0 * r))


def _mse_curve(x: np.ndarray, m: int, stage: int, plan: BootstrapPlan, path_fn, workers: int):
    n = x.size

    def one(b: int) -> np.ndarray:
        idx = replicate_rng(plan.seed, stage, b).integers(0, n, size=m)
        sub = OrderedSample(np.sort(x[idx]))
        _, aux = auxiliary_path(path_fn(sub))
        return aux * aux

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, range(plan.replicates)))
    else:
        rows = [one(b) for b in range(plan.replicates)]
    # Stacking in replicate order keeps the reduction identical however the
    # rows were produced.
    mse = np.mean(np.vstack(rows), axis=0)
    return np.arange(2, m), mse


def _argmin_level(ks: np.ndarray, mse: np.ndarray, label: str, diagnostics: dict) -> int:
    finite = np.isfinite(mse)
    if not finite.any():
        raise SelectionError(f"bootstrap MSE undefined at every level for {label}", diagnostics)
    vals = mse[finite]
    # Index estimates are dimensionless, so an absolute floor detects curves
    # that are zero up to rounding.
    if np.all(vals == vals[0]) or vals.max() <= FLAT_MSE:
        raise SelectionError(f"bootstrap MSE curve is flat for {label}", diagnostics)
    # argmin returns the first minimizer, i.e. the smallest k.
    return int(ks[np.flatnonzero(finite)[np.argmin(vals)]])


def bootstrap_osf(
    sample: OrderedSample,
    target: BootstrapTarget | str = BootstrapTarget.HILL,
    plan: BootstrapPlan | None = None,
    *,
    p: float = 0.0,
    seed: int | None = None,
    second_order: SecondOrderEstimate | None = None,
    workers: int = 1,
) -> BootstrapResult:
    """Double-bootstrap choice of the tail level minimizing the estimator's MSE.

    For each sub-sample size m in (n1, n2) the bootstrap MSE of the
    auxiliary statistic T(floor(k/2)) - T(k) is minimized over k, giving
    k1* and k2*. The two are combined as
    ``k_hat = floor(c(rho) * k1*^2 / k2*)`` clamped to ``[1, n-1]``, with
    ``c(r) = (1 - 2^r)^(2 / (1 - 2r))``. For the MVRB target r = 2 rho,
    since its residual bias is of that order. Without a usable rho, c = 1.

    Either ``plan`` or ``seed`` must be given.
    """
    target = BootstrapTarget(target)
    n = sample.n
    if plan is None:
        if seed is None:
            raise DomainError("bootstrap needs a plan or an explicit seed")
        plan = BootstrapPlan.default(n, seed)
    plan.validate_for(n)
    so = second_order
    if so is None:
        try:
            so = estimate_second_order(sample)
        except (EstimationError, DomainError):
            if target is BootstrapTarget.MVRB:
                raise
            so = None
    rho = so.rho_hat if so is not None else None
    path_fn = _path_fn(target, p, so)

    diagnostics: dict = {}
    levels = []
    for stage, m in enumerate((plan.n1, plan.n2)):
        ks, mse = _mse_curve(sample.values, m, stage, plan, path_fn, workers)
        label = f"n{stage + 1}"
        diagnostics[label] = (ks, mse)
        levels.append(_argmin_level(ks, mse, f"{label}={m}", diagnostics))
    k1, k2 = levels
    c = _c_factor(target, rho)
    k_hat = int(min(n - 1, max(1, math.floor(c * k1 * k1 / k2))))

    if target is BootstrapTarget.HILL:
        est = hill(sample, k_hat)
    elif target is BootstrapTarget.MOP:
        est = mean_order_p_evi(sample, k_hat, p)
    else:
        est = mvrb_hill(sample, k_hat, so)
    return BootstrapResult(k_hat, k1, k2, c, est, rho, diagnostics)
