"""Joint laws of the top order statistics and finite-n convergence of maxima.

The sup-distance between F^n(a_n x + b_n) and a GEV law measures how far a
finite sample maximum is from its limit. A penultimate fit picks the GEV
shape that minimizes this distance at a given n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .distributions import (
    GevParams,
    NormalizingConstants,
    gev_cdf,
    gev_logcdf,
    gev_pdf,
    gev_quantile,
    normal_attraction_constants,
)
from .errors import ConvergenceError, DomainError, InvalidModelError

__all__ = [
    "TopIPoint",
    "ParentModel",
    "ConvergenceReport",
    "top_i_cdf",
    "top_i_pdf",
    "default_grid",
    "convergence_distance",
    "penultimate_fit",
]

GRID_POINTS = 2001
GRID_TAIL = 1e-4
SHAPE_BOUNDS = (-1.0, 1.0)
SHAPE_TOL = 1e-6
COARSE_STEPS = 41


@dataclass(frozen=True)
class TopIPoint:
    """Coordinates x_1 >= x_2 >= ... >= x_i for the i largest normalized maxima."""

    coords: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(v) for v in self.coords)
        if not c:
            raise DomainError("a top-i point needs at least one coordinate")
        if any(b > a for a, b in zip(c, c[1:])):
            raise DomainError("top-i coordinates must be non-increasing")
        object.__setattr__(self, "coords", c)

    @property
    def i(self) -> int:
        return len(self.coords)

    @property
    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.coords, self.coords[1:]))


def top_i_cdf(family: GevParams, point: TopIPoint | tuple) -> float:
    """Limiting P(M^(1) <= x_1, ..., M^(i) <= x_i) for normalized top-i maxima.

    With d_j = ln G(x_j) - ln G(x_{j+1}) this is G(x_i) times the sum over
    0 = r_1 <= r_2 <= ... <= r_i, r_j <= j - 1, of
    prod_j d_j^(r_{j+1} - r_j) / (r_{j+1} - r_j)!. The nested sums are
    accumulated level by level, which keeps the cost quadratic in i.
    """
    if not isinstance(point, TopIPoint):
        point = TopIPoint(tuple(point))
    x = np.array(point.coords)
    logg = np.asarray(gev_logcdf(family, x), dtype=float).reshape(-1)
    if logg[-1] == -math.inf:
        return 0.0
    d = logg[:-1] - logg[1:]
    # weights[r] = total weight of partial paths whose last index equals r.
    weights = np.zeros(point.i)
    weights[0] = 1.0
    for j, dj in enumerate(d, start=1):
        new = np.zeros_like(weights)
        for r in range(j):
            if weights[r] == 0.0:
                continue
            for r_next in range(r, j + 1):
                step = r_next - r
                new[r_next] += weights[r] * dj**step / math.factorial(step)
        weights = new
    return float(min(1.0, math.exp(logg[-1]) * weights.sum()))


def top_i_pdf(family: GevParams, point: TopIPoint | tuple) -> float:
    """Extremal i-dimensional density g(x_i) prod_{j<i} g(x_j) / G(x_j).

    Zero unless the coordinates are strictly decreasing and inside the
    support.
    """
    if not isinstance(point, TopIPoint):
        try:
            point = TopIPoint(tuple(point))
        except DomainError:
            return 0.0
    if not point.strictly_decreasing:
        return 0.0
    x = np.array(point.coords)
    g = np.asarray(gev_pdf(family, x), dtype=float).reshape(-1)
    big_g = np.asarray(gev_cdf(family, x), dtype=float).reshape(-1)
    if np.any(g[:-1] == 0) or g[-1] == 0 or np.any(big_g[:-1] == 0):
        return 0.0
    return float(g[-1] * np.prod(g[:-1] / big_g[:-1]))


@dataclass(frozen=True)
class ParentModel:
    """Parent law F whose sample maxima are compared with a GEV limit.

    ``kind`` is one of ``normal``, ``exponential``, ``uniform`` (on [0, 1])
    or ``frechet`` (with ``alpha``, F(x) = exp(-x^-alpha)).
    """

    kind: str
    alpha: float | None = None

    KINDS = ("normal", "exponential", "uniform", "frechet")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InvalidModelError(f"unknown parent model {self.kind!r}; choose from {self.KINDS}")
        if self.kind == "frechet":
            if self.alpha is None or not self.alpha > 0:
                raise InvalidModelError("Fréchet parent needs alpha > 0")

    @classmethod
    def parse(cls, text: str) -> ParentModel:
        """Parse ``normal``, ``exponential``, ``uniform`` or ``frechet:<alpha>``."""
        name, _, arg = text.strip().lower().partition(":")
        if name == "frechet":
            try:
                return cls("frechet", float(arg))
            except ValueError:
                raise InvalidModelError(f"bad Fréchet spec {text!r}; use frechet:<alpha>") from None
        if arg:
            raise InvalidModelError(f"model {name!r} takes no parameter")
        return cls(name)

    def __str__(self) -> str:
        return f"frechet:{self.alpha:g}" if self.kind == "frechet" else self.kind

    @property
    def ultimate_shape(self) -> float:
        return {"normal": 0.0, "exponential": 0.0, "uniform": -1.0}.get(
            self.kind, 1.0 / self.alpha if self.alpha else 0.0
        )

    def logcdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            if self.kind == "normal":
                return stats.norm.logcdf(x)
            if self.kind == "exponential":
                return np.where(x > 0, np.log(-np.expm1(-np.maximum(x, 0.0))), -np.inf)
            if self.kind == "uniform":
                return np.where(x >= 1, 0.0, np.where(x > 0, np.log(np.clip(x, 1e-300, 1.0)), -np.inf))
            pos = np.where(x > 0, x, 1.0)
            return np.where(x > 0, -(pos ** -self.alpha), -np.inf)

    def default_constants(self, n: int) -> NormalizingConstants:
        """Constants taking F^n(a_n x + b_n) to the standard GEV law of its domain."""
        if n < 2:
            raise DomainError("n must be at least 2")
        if self.kind == "normal":
            return normal_attraction_constants(n)
        if self.kind == "exponential":
            return NormalizingConstants(1.0, math.log(n), n)
        if self.kind == "uniform":
            return NormalizingConstants(1.0 / n, 1.0 - 1.0 / n, n)
        b = n ** (1.0 / self.alpha)
        return NormalizingConstants(b / self.alpha, b, n)


def default_grid(target: GevParams, points: int = GRID_POINTS) -> np.ndarray:
    """Evenly spaced points between the target's 1e-4 and 1 - 1e-4 quantiles."""
    lo, hi = gev_quantile(target, [GRID_TAIL, 1.0 - GRID_TAIL])
    return np.linspace(lo, hi, points)


def _max_cdf(model: ParentModel, n: int, constants: NormalizingConstants, x: np.ndarray) -> np.ndarray:
    # F^n as exp(n ln F) so large n neither underflows nor loses precision.
    return np.exp(n * model.logcdf(constants.a_n * x + constants.b_n))


def convergence_distance(
    model: ParentModel,
    n: int,
    constants: NormalizingConstants,
    target: GevParams,
    grid=None,
) -> float:
    """sup over the grid of |F^n(a_n x + b_n) - G(x)|."""
    x = default_grid(target) if grid is None else np.asarray(grid, dtype=float)
    if x.size == 0:
        raise DomainError("grid must be nonempty")
    diff = np.abs(_max_cdf(model, n, constants, x) - np.asarray(gev_cdf(target, x)))
    return float(np.max(diff))


@dataclass(frozen=True)
class ConvergenceReport:
    model: str
    n: int
    constants: NormalizingConstants
    ultimate_shape: float
    sup_distance_ultimate: float
    sup_distance_penultimate: float
    penultimate_shape: float

    def __post_init__(self):
        if self.sup_distance_ultimate < 0 or self.sup_distance_penultimate < 0:
            raise ConvergenceError("distances must be nonnegative")


def _golden_section(f, lo: float, hi: float, tol: float, max_iter: int = 200) -> float:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            return (a + b) / 2.0
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    raise ConvergenceError(f"golden-section search did not reach tolerance {tol} in {max_iter} steps")


def penultimate_fit(
    model: ParentModel,
    n: int,
    constants: NormalizingConstants | None = None,
    grid=None,
) -> ConvergenceReport:
    """Fit the GEV shape closest in sup-distance to the law of the normalized maximum.

    The shape is searched on [-1, 1]: a coarse scan brackets the best value
    and golden-section refines it to 1e-6. The ultimate shape is always a
    candidate, so the penultimate distance never exceeds the ultimate one.
    Distances use a fixed grid built from the ultimate limit law.
    """
    if constants is None:
        constants = model.default_constants(n)
    xi0 = model.ultimate_shape
    ultimate = GevParams(xi0)
    x = default_grid(ultimate) if grid is None else np.asarray(grid, dtype=float)
    fn_vals = _max_cdf(model, n, constants, x)

    def objective(xi: float) -> float:
        val = float(np.max(np.abs(fn_vals - np.asarray(gev_cdf(GevParams(xi), x)))))
        if not math.isfinite(val):
            raise ConvergenceError(f"sup-distance is not finite at shape {xi}")
        return val

    d_ult = objective(xi0)
    lo, hi = SHAPE_BOUNDS
    coarse = np.linspace(lo, hi, COARSE_STEPS)
    scores = [objective(float(v)) for v in coarse]
    j = int(np.argmin(scores))
    a = float(coarse[max(j - 1, 0)])
    b = float(coarse[min(j + 1, COARSE_STEPS - 1)])
    xi_best = _golden_section(objective, a, b, SHAPE_TOL)
    d_best = objective(xi_best)
    if scores[j] < d_best:
        xi_best, d_best = float(coarse[j]), scores[j]
    if d_ult <= d_best:
        xi_best, d_best = xi0, d_ult
    return ConvergenceReport(str(model), int(n), constants, xi0, d_ult, d_best, xi_best)
