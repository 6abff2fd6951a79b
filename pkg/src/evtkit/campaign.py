"""Replicated simulation of estimator sample paths on synthetic models."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .distributions import GevParams, HallWelshModel, gev_sample, hall_welsh_sample, pareto_sample
from .errors import DomainError, EstimationError, InvalidModelError
from .estimators import hill_path, mean_order_p_path
from .reduced_bias import estimate_second_order, mvrb_path
from .tail_stats import OrderedSample

__all__ = ["ModelSpec", "CampaignResult", "run_campaign", "CAMPAIGN_METHODS"]

CAMPAIGN_METHODS = ("hill", "mvrb", "mop", "gj")


@dataclass(frozen=True)
class ModelSpec:
    """Synthetic model description, e.g. ``hall-welsh:xi=1,beta=1,rho=-0.5``.

    Supported kinds: ``hall-welsh`` (xi, beta, rho, optional C), ``pareto``
    (xi) and ``gev`` (xi).
    """

    kind: str
    params: tuple[tuple[str, float], ...]

    _REQUIRED = {
        "hall-welsh": ({"xi", "beta", "rho"}, {"C"}),
        "pareto": ({"xi"}, set()),
        "gev": ({"xi"}, set()),
    }

    def __post_init__(self):
        if self.kind not in self._REQUIRED:
            raise InvalidModelError(f"unknown model kind {self.kind!r}")
        required, optional = self._REQUIRED[self.kind]
        names = {k for k, _ in self.params}
        if missing := required - names:
            raise InvalidModelError(f"{self.kind} model is missing {sorted(missing)}")
        if extra := names - required - optional:
            raise InvalidModelError(f"{self.kind} model does not take {sorted(extra)}")
        # Build once so invalid parameter combinations fail at parse time.
        self._build()

    @classmethod
    def parse(cls, text: str) -> ModelSpec:
        kind, _, rest = text.strip().partition(":")
        params = []
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, eq, val = item.partition("=")
            if not eq:
                raise InvalidModelError(f"model parameter {item!r} is not key=value")
            try:
                params.append((key.strip(), float(val)))
            except ValueError:
                raise InvalidModelError(f"model parameter {key!r} is not a number") from None
        return cls(kind.strip().lower(), tuple(params))

    @property
    def mapping(self) -> dict[str, float]:
        return dict(self.params)

    @property
    def true_xi(self) -> float:
        return self.mapping["xi"]

    def _build(self):
        p = self.mapping
        if self.kind == "hall-welsh":
            return HallWelshModel(p["xi"], p["beta"], p["rho"], p.get("C", 1.0))
        if self.kind == "pareto":
            if not p["xi"] > 0:
                raise InvalidModelError("Pareto xi must be positive")
            return p["xi"]
        return GevParams(p["xi"])

    def sample(self, n: int, seed) -> OrderedSample:
        model = self._build()
        if self.kind == "hall-welsh":
            return hall_welsh_sample(model, n, seed)
        if self.kind == "pareto":
            return pareto_sample(model, n, seed)
        return gev_sample(model, n, seed)

    def __str__(self) -> str:
        args = ",".join(f"{k}={v:g}" for k, v in self.params)
        return f"{self.kind}:{args}"


@dataclass(frozen=True)
class CampaignResult:
    """Per-level summaries; ``columns`` maps a column name to one value per k."""

    model: str
    n: int
    replicates: int
    seed: int
    ks: np.ndarray
    columns: dict

    def header(self) -> list[str]:
        return ["k", *self.columns]

    def rows(self):
        for j, k in enumerate(self.ks):
            yield [int(k), *(float(col[j]) for col in self.columns.values())]


def _replicate_paths(spec: ModelSpec, n: int, seed: int, r: int, ks: np.ndarray, methods, p: float):
    ss = np.random.SeedSequence(seed, spawn_key=(r,))
    sample = spec.sample(n, ss)
    out = {}
    h = hill_path(sample, ks)
    so = None
    if {"mvrb", "gj"} & set(methods):
        try:
            so = estimate_second_order(sample)
        except (EstimationError, DomainError):
            so = None
    for m in methods:
        if m == "hill":
            out[m] = h
        elif m == "mop":
            out[m] = mean_order_p_path(sample, p, ks)
        elif m == "mvrb":
            out[m] = mvrb_path(sample, so, ks) if so else np.full(ks.size, np.nan)
        elif m == "gj":
            if so is None or np.any(ks < 2):
                out[m] = np.full(ks.size, np.nan)
            else:
                alpha = 2.0 ** (-so.rho_hat)
                half = hill_path(sample, ks // 2)
                out[m] = (h - alpha * half) / (1.0 - alpha)
    return out


def _summaries(values: np.ndarray, truth: float) -> dict[str, np.ndarray]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        q05, med, q95 = np.nanquantile(values, [0.05, 0.5, 0.95], axis=0)
        mse = np.nanmean((values - truth) ** 2, axis=0)
    valid = np.sum(np.isfinite(values), axis=0)
    return {"median": med, "q05": q05, "q95": q95, "mse": mse, "valid": valid.astype(float)}


def run_campaign(
    spec: ModelSpec,
    n: int,
    replicates: int,
    seed: int,
    ks=None,
    methods=("hill", "mvrb"),
    p: float = 0.0,
    workers: int = 1,
) -> CampaignResult:
    """Simulate ``replicates`` samples and summarize each estimator path over k.

    Replicate r draws from SeedSequence(seed, spawn_key=(r,)), so the result
    does not depend on ``workers``. Columns are ``<method>_median``,
    ``_q05``, ``_q95``, ``_mse`` (against the model's true xi) and
    ``_valid`` (replicates where the estimate was defined).
    """
    for m in methods:
        if m not in CAMPAIGN_METHODS:
            raise DomainError(f"unknown campaign method {m!r}; choose from {CAMPAIGN_METHODS}")
    if replicates < 1:
        raise DomainError("need at least one replicate")
    ks = np.arange(2, n // 2 + 1) if ks is None else np.asarray(ks, dtype=int)
    if ks.size == 0 or ks.min() < 1 or ks.max() >= n:
        raise DomainError(f"tail levels must lie in 1..{n - 1}")

    def one(r: int):
        return _replicate_paths(spec, n, seed, r, ks, methods, p)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            paths = list(pool.map(one, range(replicates)))
    else:
        paths = [one(r) for r in range(replicates)]

    columns = {}
    for m in methods:
        stacked = np.vstack([pth[m] for pth in paths])
        for name, col in _summaries(stacked, spec.true_xi).items():
            columns[f"{m}_{name}"] = col
    return CampaignResult(str(spec), n, replicates, seed, ks, columns)


def mid_range(n: int) -> tuple[int, int]:
    """Levels floor(n^0.6)..floor(n^0.9) used for MVRB-versus-Hill comparisons."""
    return math.floor(n**0.6), math.floor(n**0.9)
