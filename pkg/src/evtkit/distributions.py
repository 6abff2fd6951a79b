"""Extreme-value distribution families and synthetic heavy-tail models.

Covers the GEV law (and its Gumbel, Fréchet and max-Weibull members), the
max-semi-stable generalization, Hall-Welsh second-order models used as
simulation oracles, and the von Mises attraction constants for the normal
parent.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import DomainError, InvalidModelError
from .tail_stats import OrderedSample

__all__ = [
    "GevParams",
    "MssParams",
    "HallWelshModel",
    "NormalizingConstants",
    "gev_cdf",
    "gev_logcdf",
    "gev_pdf",
    "gev_quantile",
    "gev_sample",
    "max_stable_constants",
    "max_stability_defect",
    "mss_cdf",
    "hall_welsh_quantile",
    "hall_welsh_sample",
    "pareto_sample",
    "normal_attraction_constants",
]

# Below this |xi| the Gumbel branch is used; avoids cancellation in (1+xi*z)^(-1/xi).
XI_EPS = 1e-8


def _scalar_or_array(out: np.ndarray, like) -> float | np.ndarray:
    return float(out) if np.ndim(like) == 0 else out


@dataclass(frozen=True)
class GevParams:
    """Shape, location and scale of a GEV law G_xi((x - location) / scale)."""

    shape: float
    location: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.shape) and math.isfinite(self.location)):
            raise InvalidModelError("GEV shape and location must be finite")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise InvalidModelError(f"GEV scale must be positive, got {self.scale}")

    @classmethod
    def gumbel(cls) -> GevParams:
        return cls(0.0)

    @classmethod
    def frechet(cls, alpha: float) -> GevParams:
        """Type II law exp(-x^-alpha), x >= 0, written as a GEV member."""
        if alpha <= 0:
            raise InvalidModelError("Fréchet alpha must be positive")
        return cls(1.0 / alpha, location=1.0, scale=1.0 / alpha)

    @classmethod
    def max_weibull(cls, alpha: float) -> GevParams:
        """Type III law exp(-(-x)^alpha), x <= 0, written as a GEV member."""
        if alpha <= 0:
            raise InvalidModelError("max-Weibull alpha must be positive")
        return cls(-1.0 / alpha, location=-1.0, scale=1.0 / alpha)

    @property
    def upper_endpoint(self) -> float:
        if self.shape < -XI_EPS:
            return self.location - self.scale / self.shape
        return math.inf

    @property
    def lower_endpoint(self) -> float:
        if self.shape > XI_EPS:
            return self.location - self.scale / self.shape
        return -math.inf


@dataclass(frozen=True)
class NormalizingConstants:
    """Attraction coefficients so that F^n(a_n x + b_n) approaches a GEV law."""

    a_n: float
    b_n: float
    n: int

    def __post_init__(self):
        if not (self.a_n > 0 and math.isfinite(self.a_n)):
            raise DomainError(f"a_n must be positive and finite, got {self.a_n}")
        if not math.isfinite(self.b_n):
            raise DomainError("b_n must be finite")


def gev_logcdf(params: GevParams, x) -> float | np.ndarray:
    """Natural log of the GEV CDF; -inf below the support, 0 above it."""
    z = (np.asarray(x, dtype=float) - params.location) / params.scale
    xi = params.shape
    if abs(xi) <= XI_EPS:
        out = -np.exp(-z)
    else:
        t = xi * z
        inside = t > -1.0
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            val = -np.exp(-np.log1p(np.where(inside, t, 0.0)) / xi)
        outside = -np.inf if xi > 0 else 0.0
        out = np.where(inside, val, outside)
    return _scalar_or_array(np.asarray(out, dtype=float), x)


def gev_cdf(params: GevParams, x) -> float | np.ndarray:
    """GEV CDF, continuous in the shape at zero.

    Returns 0 below the lower endpoint (xi > 0) and 1 above the upper
    endpoint (xi < 0). Accepts scalars or arrays.
    """
    out = np.exp(np.asarray(gev_logcdf(params, x)))
    return _scalar_or_array(out, x)


def gev_pdf(params: GevParams, x) -> float | np.ndarray:
    """Density of the GEV law; zero outside the open support."""
    z = (np.asarray(x, dtype=float) - params.location) / params.scale
    xi = params.shape
    if abs(xi) <= XI_EPS:
        out = np.exp(-z - np.exp(-z)) / params.scale
    else:
        t = xi * z
        inside = t > -1.0
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            lt = np.log1p(np.where(inside, t, 0.0))
            y = np.exp(-lt / xi)  # (1 + xi z)^(-1/xi)
            val = y * np.exp(-lt) * np.exp(-y) / params.scale
        out = np.where(inside, val, 0.0)
    return _scalar_or_array(np.asarray(out, dtype=float), x)


def gev_quantile(params: GevParams, q) -> float | np.ndarray:
    """Analytic inverse of :func:`gev_cdf` for q in (0, 1)."""
    qa = np.asarray(q, dtype=float)
    if np.any(~((qa > 0) & (qa < 1))):
        raise DomainError("quantile level must lie strictly between 0 and 1")
    mlq = -np.log(qa)
    xi = params.shape
    if abs(xi) <= XI_EPS:
        z = -np.log(mlq)
    else:
        z = np.expm1(-xi * np.log(mlq)) / xi
    return _scalar_or_array(params.location + params.scale * z, q)


def gev_sample(params: GevParams, n: int, seed: int) -> OrderedSample:
    """Inverse-transform sample of size ``n``; deterministic in ``seed``."""
    if n < 1:
        raise DomainError("sample size must be at least 1")
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    # random() can return exactly 0.0; nudge into the open interval.
    u = np.where(u == 0.0, np.nextafter(0.0, 1.0), u)
    return OrderedSample.from_data(
        gev_quantile(params, u), provenance=f"gev(xi={params.shape}) seed={seed}", min_size=1
    )


def max_stable_constants(params: GevParams, k: int) -> tuple[float, float]:
    """Constants (A_k, B_k) with G^k(A_k x + B_k) = G(x) for this GEV member."""
    if k < 1:
        raise DomainError("k must be a positive integer")
    xi = params.shape
    if abs(xi) <= XI_EPS:
        a0, b0 = 1.0, math.log(k)
    else:
        a0 = k**xi
        b0 = math.expm1(xi * math.log(k)) / xi
    mu, sigma = params.location, params.scale
    return a0, mu + sigma * b0 - a0 * mu


def max_stability_defect(
    params: GevParams, k: int, a_k: float, b_k: float, grid
) -> float:
    """Largest absolute gap between G^k(a_k x + b_k) and G(x) over ``grid``."""
    if a_k <= 0:
        raise DomainError("A_k must be positive")
    if k < 1:
        raise DomainError("k must be a positive integer")
    x = np.asarray(grid, dtype=float)
    if x.size == 0:
        raise DomainError("grid must be nonempty")
    lhs = np.exp(k * np.asarray(gev_logcdf(params, a_k * x + b_k)))
    rhs = np.asarray(gev_cdf(params, x))
    return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class MssParams:
    """Max-semi-stable law: GEV shape plus a positive, bounded, periodic ``nu``.

    ``nu`` must accept numpy arrays. It is checked on a dense grid over two
    periods at construction.
    """

    shape: float
    nu: Callable[[np.ndarray], np.ndarray] = field(default=lambda x: np.ones_like(np.asarray(x, dtype=float)))
    period: float = 1.0
    check_points: int = 4001

    def __post_init__(self):
        if not math.isfinite(self.shape):
            raise InvalidModelError("MSS shape must be finite")
        if not (self.period > 0 and math.isfinite(self.period)):
            raise InvalidModelError("nu period must be positive and finite")
        grid = np.linspace(0.0, self.period, self.check_points)
        v = np.asarray(self.nu(grid), dtype=float) * np.ones_like(grid)
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise InvalidModelError("nu must be finite and strictly positive")
        shifted = np.asarray(self.nu(grid + self.period), dtype=float) * np.ones_like(grid)
        if not np.allclose(v, shifted, rtol=1e-9, atol=1e-12):
            raise InvalidModelError("nu is not periodic with the declared period")

    @classmethod
    def sinusoidal(cls, shape: float, level: float, amplitude: float, period: float = 1.0) -> MssParams:
        """nu(x) = level + amplitude * sin(2 pi x / period)."""
        return cls(
            shape,
            nu=lambda x: level + amplitude * np.sin(2 * np.pi * np.asarray(x, dtype=float) / period),
            period=period,
        )


def mss_cdf(params: MssParams, x) -> float | np.ndarray:
    xa = np.asarray(x, dtype=float)
    xi = params.shape
    if abs(xi) <= XI_EPS:
        nu = np.asarray(params.nu(xa), dtype=float) * np.ones_like(xa)
        out = np.exp(-nu * np.exp(-xa))
    else:
        t = xi * xa
        inside = t > -1.0
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            lt = np.log1p(np.where(inside, t, 0.0))
            nu = np.asarray(params.nu(lt / xi), dtype=float) * np.ones_like(xa)
            val = np.exp(-nu * np.exp(-lt / xi))
        out = np.where(inside, val, 0.0 if xi > 0 else 1.0)
    return _scalar_or_array(np.asarray(out, dtype=float), x)


@dataclass(frozen=True)
class HallWelshModel:
    """Second-order heavy-tail model with tail quantile U(t) = C t^xi (1 + A(t)/rho).

    A(t) = xi * beta * t^rho. The o(t^rho) remainder of the class is dropped,
    so (xi, beta, rho) are the exact second-order parameters of samples drawn
    from it.
    """

    xi: float
    beta: float
    rho: float
    C: float = 1.0

    def __post_init__(self):
        if not (self.xi > 0 and math.isfinite(self.xi)):
            raise InvalidModelError("Hall-Welsh xi must be positive")
        if not (self.rho < 0 and math.isfinite(self.rho)):
            raise InvalidModelError("Hall-Welsh rho must be negative")
        if self.beta == 0 or not math.isfinite(self.beta):
            raise InvalidModelError("Hall-Welsh beta must be nonzero")
        if not (self.C > 0 and math.isfinite(self.C)):
            raise InvalidModelError("Hall-Welsh C must be positive")
        # U'(t) = C xi t^(xi-1) (1 + c t^rho) with c = beta (xi + rho) / rho, and
        # t^rho sweeps (0, 1) on t > 1, so U is increasing iff 1 + c >= 0.
        if 1.0 + self.slope_coefficient < 0:
            raise InvalidModelError(
                "tail quantile function is not increasing on t > 1 "
                f"(1 + beta (xi + rho) / rho = {1.0 + self.slope_coefficient:.6g} < 0)"
            )

    @property
    def slope_coefficient(self) -> float:
        return self.beta * (self.xi + self.rho) / self.rho

    def A(self, t):
        return self.xi * self.beta * np.asarray(t, dtype=float) ** self.rho

    def quantile(self, t):
        return hall_welsh_quantile(self, t)


def hall_welsh_quantile(model: HallWelshModel, t) -> float | np.ndarray:
    """U(t) = C t^xi (1 + xi beta t^rho / rho) for t >= 1.

    Near t = 1 the value can be nonpositive for some valid models (for
    instance xi = 1, beta = 1, rho = -0.5 gives U(1) = -1); only the upper
    tail is positive.
    """
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 1):
        raise DomainError("tail quantile function is defined for t >= 1")
    out = model.C * ta**model.xi * (1.0 + model.xi * model.beta * ta**model.rho / model.rho)
    return _scalar_or_array(out, t)


def hall_welsh_sample(model: HallWelshModel, n: int, seed: int) -> OrderedSample:
    """Inverse transform X = U(1 / (1 - V)) with V uniform on [0, 1)."""
    if n < 1:
        raise DomainError("sample size must be at least 1")
    v = np.random.default_rng(seed).random(n)
    x = hall_welsh_quantile(model, 1.0 / (1.0 - v))
    return OrderedSample.from_data(
        x, provenance=f"hall-welsh({model.xi},{model.beta},{model.rho},{model.C}) seed={seed}", min_size=1
    )


def pareto_sample(xi: float, n: int, seed: int, scale: float = 1.0) -> OrderedSample:
    """Strict Pareto sample, U(t) = scale * t^xi; no second-order term."""
    if xi <= 0 or scale <= 0:
        raise DomainError("Pareto xi and scale must be positive")
    if n < 1:
        raise DomainError("sample size must be at least 1")
    v = np.random.default_rng(seed).random(n)
    return OrderedSample.from_data(
        scale * (1.0 / (1.0 - v)) ** xi, provenance=f"pareto({xi}) seed={seed}", min_size=1
    )


def normal_attraction_constants(n: int) -> NormalizingConstants:
    """von Mises constants for the standard normal: 1 - Phi(b_n) = 1/n, a_n = 1/(n phi(b_n))."""
    if n < 2:
        raise DomainError("normal attraction constants need n >= 2")
    b = float(stats.norm.isf(1.0 / n))
    a = 1.0 / (n * float(stats.norm.pdf(b)))
    return NormalizingConstants(a, b, int(n))
