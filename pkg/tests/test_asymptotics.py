import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from evtkit import (
    ConvergenceError,
    DomainError,
    GevParams,
    InvalidModelError,
    NormalizingConstants,
    ParentModel,
    TopIPoint,
    convergence_distance,
    gev_cdf,
    gev_pdf,
    penultimate_fit,
    top_i_cdf,
    top_i_pdf,
)
from evtkit.asymptotics import _golden_section, default_grid

GUMBEL = GevParams.gumbel()

# Independent high-precision quadrature values (mpmath, 40 digits) for the
# normal parent with constants b_n = Phi^{-1}(1 - 1/n), a_n = 1 / (n phi(b_n)),
# over the default 2001-point Gumbel grid.
NORMAL_ORACLE = {
    100: (2.3263478740408411, 0.37520436157295173, 0.027189746612805106),
    1000: (3.0902323061678135, 0.29699235158923113, 0.018246785056059555),
}


def test_point_validation():
    with pytest.raises(DomainError):
        TopIPoint(())
    with pytest.raises(DomainError):
        TopIPoint((0.0, 1.0))
    p = TopIPoint((2.0, 2.0, 1.0))
    assert p.i == 3 and not p.strictly_decreasing


@pytest.mark.parametrize("xi", [-0.5, 0.0, 0.7])
@pytest.mark.parametrize("x", [-0.5, 0.3, 1.8])
def test_single_coordinate_is_gev(xi, x):
    fam = GevParams(xi)
    assert top_i_cdf(fam, (x,)) == pytest.approx(float(gev_cdf(fam, x)), abs=1e-15)
    assert top_i_pdf(fam, (x,)) == pytest.approx(float(gev_pdf(fam, x)), abs=1e-15)


@given(x=st.floats(-2, 6), i=st.integers(2, 6))
def test_equal_coordinates_reduce_to_max_law(x, i):
    assert top_i_cdf(GUMBEL, (x,) * i) == pytest.approx(float(gev_cdf(GUMBEL, x)), rel=1e-12, abs=1e-300)


def test_increasing_coordinates_rejected():
    with pytest.raises(DomainError):
        top_i_cdf(GUMBEL, (0.0, 1.0))
    assert top_i_pdf(GUMBEL, (0.0, 1.0)) == 0.0
    assert top_i_pdf(GUMBEL, (1.0, 1.0)) == 0.0


def test_top_two_gumbel_closed_form():
    # G(x2) (1 + ln G(x1) - ln G(x2)) at (1, 0) equals e^-1 (2 - e^-1).
    expected = math.exp(-1) * (2 - math.exp(-1))
    assert top_i_cdf(GUMBEL, (1.0, 0.0)) == pytest.approx(expected, rel=1e-14)


def test_top_three_gumbel_closed_form():
    x = (2.0, 1.0, -0.5)
    lg = [-math.exp(-v) for v in x]
    d1, d2 = lg[0] - lg[1], lg[1] - lg[2]
    # Paths (r2, r3) in {(0,0), (0,1), (0,2), (1,1), (1,2)}.
    s = 1 + d2 + d2**2 / 2 + d1 + d1 * d2
    assert top_i_cdf(GUMBEL, x) == pytest.approx(math.exp(lg[2]) * s, rel=1e-13)


def test_top_two_cdf_matches_monte_carlo():
    # The two largest of n exponentials, drawn exactly through the uniform
    # order statistics U_(n) = V^(1/n), U_(n-1) = U_(n) W^(1/(n-1)).
    n, reps = 10_000, 100_000
    rng = np.random.default_rng(2024)
    u1 = rng.random(reps) ** (1.0 / n)
    u2 = u1 * rng.random(reps) ** (1.0 / (n - 1))
    m1 = -np.log1p(-u1) - math.log(n)
    m2 = -np.log1p(-u2) - math.log(n)
    mc = np.mean((m1 <= 1.0) & (m2 <= 0.0))
    assert top_i_cdf(GUMBEL, (1.0, 0.0)) == pytest.approx(mc, abs=0.01)


def test_top_two_pdf_hand_value():
    assert top_i_pdf(GUMBEL, (1.0, 0.0)) == pytest.approx(math.exp(-2), abs=1e-9)


def test_pdf_outside_support_is_zero():
    fam = GevParams(0.5)  # lower endpoint -2
    assert top_i_pdf(fam, (1.0, -3.0)) == 0.0


def test_top_two_pdf_integrates_to_one():
    val, _ = integrate.dblquad(
        lambda x2, x1: top_i_pdf(GUMBEL, (x1, x2)),
        -4.0, 30.0,
        lambda x1: -4.0, lambda x1: x1,
        epsabs=1e-9,
    )
    assert val == pytest.approx(1.0, abs=1e-3)


@pytest.mark.slow
def test_top_three_pdf_integrates_to_one():
    val, _ = integrate.tplquad(
        lambda x3, x2, x1: top_i_pdf(GUMBEL, (x1, x2, x3)),
        -4.0, 25.0,
        lambda x1: -4.0, lambda x1: x1,
        lambda x1, x2: -4.0, lambda x1, x2: x2,
        epsabs=1e-7, epsrel=1e-7,
    )
    assert val == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("xi", [-0.4, 0.0, 0.5])
def test_marginal_consistency(xi):
    fam = GevParams(xi)
    for x1 in (-0.5, 0.5, 2.0):
        # Second coordinate pushed to the upper tail of its own range.
        assert top_i_cdf(fam, (x1, x1 - 1e-12)) == pytest.approx(float(gev_cdf(fam, x1)), abs=1e-8)


def test_top_two_below_single_max():
    # Adding a constraint can only lower the probability.
    for x2 in (-1.0, 0.0, 0.9):
        assert top_i_cdf(GUMBEL, (1.0, x2)) <= top_i_cdf(GUMBEL, (1.0,)) + 1e-15


def test_parent_model_parsing():
    assert ParentModel.parse("frechet:2") == ParentModel("frechet", 2.0)
    assert ParentModel.parse("Normal").kind == "normal"
    for bad in ("gamma", "frechet", "frechet:x", "frechet:-1", "normal:2"):
        with pytest.raises(InvalidModelError):
            ParentModel.parse(bad)


@pytest.mark.parametrize("alpha", [0.5, 2.0, 4.0])
@pytest.mark.parametrize("n", [10, 1000, 10**6])
def test_frechet_parent_is_exact(alpha, n):
    model = ParentModel("frechet", alpha)
    target = GevParams(1 / alpha)
    d = convergence_distance(model, n, model.default_constants(n), target)
    assert d <= 1e-12
    # Plain Fréchet norming against the Fréchet law in its own parameterization.
    plain = NormalizingConstants(n ** (1 / alpha), 0.0, n)
    grid = np.linspace(0.2, 20.0, 500)
    assert np.max(np.abs(np.exp(n * model.logcdf(plain.a_n * grid)) - np.exp(-grid**-alpha))) <= 1e-12


def test_exponential_distance_decreases():
    model = ParentModel("exponential")
    d = [convergence_distance(model, n, model.default_constants(n), GUMBEL) for n in (10, 100, 1000)]
    assert d[0] > d[1] > d[2] > 0


def test_uniform_distance_decreases():
    model = ParentModel("uniform")
    d = [convergence_distance(model, n, model.default_constants(n), GevParams(-1.0)) for n in (10, 100, 1000)]
    assert d[0] > d[1] > d[2]


@pytest.mark.parametrize("n", [100, 1000])
def test_normal_distance_matches_quadrature_oracle(n):
    b, a, dist = NORMAL_ORACLE[n]
    model = ParentModel("normal")
    c = model.default_constants(n)
    assert c.b_n == pytest.approx(b, rel=1e-13)
    assert c.a_n == pytest.approx(a, rel=1e-12)
    assert convergence_distance(model, n, c, GUMBEL) == pytest.approx(dist, rel=1e-9)


def test_distance_requires_nonempty_grid():
    model = ParentModel("exponential")
    with pytest.raises(DomainError):
        convergence_distance(model, 10, model.default_constants(10), GUMBEL, grid=[])


def test_default_grid_spans_tail_quantiles():
    g = default_grid(GUMBEL)
    assert g.size == 2001
    assert float(gev_cdf(GUMBEL, g[0])) == pytest.approx(1e-4, rel=1e-9)
    assert float(gev_cdf(GUMBEL, g[-1])) == pytest.approx(1 - 1e-4, rel=1e-9)


@pytest.mark.parametrize("n", [100, 1000])
def test_normal_penultimate_dominates(n):
    rep = penultimate_fit(ParentModel("normal"), n)
    assert rep.ultimate_shape == 0.0
    assert rep.sup_distance_penultimate < rep.sup_distance_ultimate
    assert rep.penultimate_shape < 0
    assert rep.sup_distance_ultimate == pytest.approx(NORMAL_ORACLE[n][2], rel=1e-9)


def test_normal_penultimate_shape_shrinks():
    small = penultimate_fit(ParentModel("normal"), 100).penultimate_shape
    large = penultimate_fit(ParentModel("normal"), 10**5).penultimate_shape
    assert abs(large) < abs(small)


def test_frechet_penultimate_is_exact():
    rep = penultimate_fit(ParentModel("frechet", 2.0), 500)
    assert rep.penultimate_shape == 0.5
    assert rep.sup_distance_penultimate <= 1e-8


@pytest.mark.parametrize("kind", ["exponential", "uniform"])
def test_penultimate_never_worse(kind):
    for n in (10, 1000):
        rep = penultimate_fit(ParentModel(kind), n)
        assert rep.sup_distance_penultimate <= rep.sup_distance_ultimate
        assert -1.0 <= rep.penultimate_shape <= 1.0


def test_golden_section_finds_minimum():
    assert _golden_section(lambda v: (v - 0.3) ** 2, -1.0, 1.0, 1e-8) == pytest.approx(0.3, abs=1e-7)
    with pytest.raises(ConvergenceError):
        _golden_section(lambda v: v * v, -1.0, 1.0, 1e-12, max_iter=5)
