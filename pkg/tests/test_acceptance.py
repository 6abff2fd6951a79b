"""Acceptance checks, one per criterion, each at its stated tolerance and time budget.

Every criterion prints a single ``PASS``/``FAIL`` line with the measured
numbers. Run under pytest (``pytest tests/test_acceptance.py -v``) or
directly (``python tests/test_acceptance.py``).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np
import pytest
from click.testing import CliRunner
from scipy import integrate

from evtkit import (
    BootstrapPlan,
    GevParams,
    HallWelshModel,
    OrderedSample,
    ParentModel,
    PortConfig,
    SecondOrderEstimate,
    armax_sample,
    blocks_ei,
    bootstrap_osf,
    ei_probability_ratio,
    empirical_threshold,
    estimate_second_order,
    generalized_jackknife,
    gev_quantile,
    gev_sample,
    gumbel_statistic,
    hall_welsh_sample,
    hill,
    jackknife_pseudo_values,
    max_stability_defect,
    max_stable_constants,
    mean_order_p_evi,
    mixed_moment,
    moment,
    mvrb_hill,
    pareto_sample,
    penultimate_fit,
    port_evi,
    power_mean_evi,
    top_i_cdf,
    top_i_pdf,
)
from evtkit.cli import main as cli_main
from evtkit.estimators import hill_path
from evtkit.reduced_bias import mvrb_path

E = math.e
HAND = OrderedSample.from_data([1, E, E**2, E**3])
SMALL = OrderedSample.from_data([1, E, E**2])
GUMBEL = GevParams.gumbel()


@dataclass
class Outcome:
    number: int
    title: str
    budget: float
    checks: list = field(default_factory=list)
    elapsed: float = 0.0

    def check(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append((name, bool(ok), detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks) and self.elapsed <= self.budget

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = [("" if ok else "FAILED ") + f"{n} {d}".strip() for n, ok, d in self.checks]
        if self.elapsed > self.budget:
            parts.append(f"FAILED runtime over {self.budget:g}s")
        return f"criterion {self.number} {status} [{self.elapsed:.1f}s] {self.title}: " + "; ".join(parts)


def timed(number: int, title: str, budget: float):
    def wrap(fn):
        def run() -> Outcome:
            out = Outcome(number, title, budget)
            t0 = time.perf_counter()
            fn(out)
            out.elapsed = time.perf_counter() - t0
            return out

        run.__name__ = fn.__name__
        return run

    return wrap


@timed(1, "exact identities", 1.0)
def criterion_1(out: Outcome) -> None:
    h = hill(HAND, 3).value
    out.check("hill", abs(h - 2.0) <= 1e-15, f"{h!r}")
    m = moment(SMALL, 2).value
    out.check("moment", abs(m + 2.5) <= 1e-12, f"{m:.15g}")
    mm = mixed_moment(SMALL, 2).value
    out.check("mixed-moment", abs(mm - 0.34193) <= 1e-5, f"{mm:.7f}")

    x = hall_welsh_sample(HallWelshModel(0.5, 1.0, -1.0), 1000, seed=0)
    ks = range(2, 400, 7)
    out.check("mop(p=0)=hill bitwise", all(mean_order_p_evi(x, k, 0.0).value == hill(x, k).value for k in ks))
    out.check("pme(p=1)=hill bitwise", all(power_mean_evi(x, k, 1.0).value == hill(x, k).value for k in ks))

    w = gumbel_statistic(OrderedSample.from_data([1, 2, 3, 4, 5]))
    out.check("gumbel W", abs(w - 1.0) <= 1e-15, f"{w!r}")
    gj = generalized_jackknife(1.2, 1.0, 0.5)
    out.check("generalized jackknife", abs(gj - 1.4) <= 1e-15, f"{gj!r}")
    so = SecondOrderEstimate(-0.7, 0.0, 999)
    out.check("mvrb(beta=0)=hill", all(mvrb_hill(x, k, so).value == hill(x, k).value for k in ks))
    obs = np.array([0.5, 2.0, -1.0, 7.25, 3.3])
    pv = jackknife_pseudo_values(np.mean, obs)
    out.check("mean pseudo-values", np.max(np.abs(pv - obs)) <= 1e-12, f"max gap {np.max(np.abs(pv - obs)):.1e}")


@timed(2, "invariance suite", 10.0)
def criterion_2(out: Outcome) -> None:
    x = hall_welsh_sample(HallWelshModel(0.5, 1.0, -1.0), 2000, seed=1)
    so = estimate_second_order(x)
    estimators = {
        "hill": lambda s, k: hill(s, k).value,
        "moment": lambda s, k: moment(s, k).value,
        "mixed-moment": lambda s, k: mixed_moment(s, k).value,
        "pme(0.5)": lambda s, k: power_mean_evi(s, k, 0.5).value,
        "pme(2)": lambda s, k: power_mean_evi(s, k, 2.0).value,
        "mop(0.25)": lambda s, k: mean_order_p_evi(s, k, 0.25).value,
        "mop(-1)": lambda s, k: mean_order_p_evi(s, k, -1.0).value,
        "port-hill": lambda s, k: port_evi(s, PortConfig(0.1), k, "hill").value,
        "port-moment": lambda s, k: port_evi(s, PortConfig(0.1), k, "moment").value,
        "port-mixed-moment": lambda s, k: port_evi(s, PortConfig(0.1), k, "mixed-moment").value,
    }
    worst = 0.0
    for c in (1e-3, 3.7, 1e4):
        xs = x.scaled(c)
        so_c = estimate_second_order(xs)
        for k in (10, 100, 400):
            for f in estimators.values():
                a, b = f(x, k), f(xs, k)
                worst = max(worst, abs(b - a) / abs(a))
            a, b = mvrb_hill(x, k, so).value, mvrb_hill(xs, k, so_c).value
            worst = max(worst, abs(b - a) / abs(a))
    out.check("scale invariance", worst <= 1e-12, f"max rel drift {worst:.1e}")

    # Values on a 2^-20 grid below 2^20: shifts by +-1000 are exact in binary.
    raw = np.round(np.random.default_rng(2).pareto(2.0, size=1000) * 2**20) / 2**20
    d = OrderedSample.from_data(raw)
    exact = True
    for lam in (-1e3, 1e3):
        for base in ("hill", "moment", "mixed-moment"):
            for k in (20, 100, 500):
                exact &= port_evi(d.shifted(lam), PortConfig(0.1), k, base).value == port_evi(d, PortConfig(0.1), k, base).value
    out.check("PORT location invariance exact", exact)

    g = gev_sample(GevParams(0.2), 500, seed=3)
    w0 = gumbel_statistic(g)
    drift = max(abs(gumbel_statistic(g.scaled(a).shifted(b)) - w0) / abs(w0)
                for a, b in ((0.01, -5.0), (7.0, 100.0), (1e3, 1e4)))
    out.check("gumbel W affine invariance", drift <= 1e-12, f"max rel drift {drift:.1e}")

    defects = []
    for params in (GevParams.gumbel(), GevParams.frechet(2.0), GevParams.max_weibull(2.0)):
        grid = np.asarray(gev_quantile(params, np.linspace(1e-4, 1 - 1e-4, 2001)))
        for k in (2, 10, 1000):
            a_k, b_k = max_stable_constants(params, k)
            defects.append(max_stability_defect(params, k, a_k, b_k, grid))
    out.check("max-stability defect", max(defects) <= 1e-12, f"max {max(defects):.1e}")


@timed(3, "Monte Carlo consistency", 300.0)
def criterion_3(out: Outcome) -> None:
    hills = [hill(pareto_sample(0.5, 5000, seed=s), 70).value for s in range(200)]
    med = float(np.median(hills))
    out.check("hill on Pareto(0.5)", abs(med - 0.5) <= 0.05, f"median {med:.4f}")

    hw = HallWelshModel(1.0, 1.0, -0.5)
    rhos = [estimate_second_order(hall_welsh_sample(hw, 20_000, seed=s)).rho_hat for s in range(100)]
    med = float(np.median(rhos))
    out.check("rho_hat on Hall-Welsh", abs(med + 0.5) <= 0.15, f"median {med:.4f}")

    n = 5000
    ks = np.arange(math.floor(n**0.6), math.floor(n**0.9) + 1)
    h, hb = [], []
    for s in range(200):
        x = hall_welsh_sample(hw, n, seed=s)
        h.append(hill_path(x, ks))
        hb.append(mvrb_path(x, estimate_second_order(x), ks))
    h, hb = np.array(h), np.array(hb)
    mse_h = np.mean((h - 1.0) ** 2, axis=0)
    mse_hb = np.mean((hb - 1.0) ** 2, axis=0)
    ok = mse_hb <= mse_h  # NaN where an estimate is undefined compares False
    defined = np.isfinite(mse_h) & np.isfinite(mse_hb)
    out.check(
        "MVRB MSE <= Hill MSE",
        bool(np.all(ok)),
        f"holds at {int(ok.sum())}/{ks.size} levels; defined at {int(defined.sum())}; "
        f"first failing k {int(ks[~ok][0]) if (~ok).any() else '-'}",
    )


@timed(4, "bootstrap tail-level selection", 600.0)
def criterion_4(out: Outcome) -> None:
    hw = HallWelshModel(1.0, 1.0, -0.5)
    n, reps = 5000, 100
    paths, chosen = [], []
    first = None
    for s in range(reps):
        x = hall_welsh_sample(hw, n, seed=s)
        res = bootstrap_osf(x, "hill", BootstrapPlan.default(n, seed=s, replicates=250))
        if first is None:
            first = (x, res)
        paths.append(hill_path(x))
        chosen.append(res.estimate.value)
    paths = np.array(paths)
    mse_curve = np.mean((paths - 1.0) ** 2, axis=0)
    oracle = float(np.nanmin(mse_curve))
    k_oracle = int(np.nanargmin(mse_curve)) + 1
    mse_hat = float(np.mean((np.array(chosen) - 1.0) ** 2))
    ratio = mse_hat / oracle
    out.check("MSE at k_hat <= 1.5 x oracle", ratio <= 1.5,
              f"ratio {ratio:.2f} (bootstrap {mse_hat:.5f}, oracle {oracle:.5f} at k={k_oracle})")

    x, res = first
    again = bootstrap_osf(x, "hill", BootstrapPlan.default(n, seed=0, replicates=250))
    same = (
        again.k_hat == res.k_hat
        and again.estimate.value == res.estimate.value
        and all(np.array_equal(again.diagnostics[s][1], res.diagnostics[s][1], equal_nan=True) for s in ("n1", "n2"))
    )
    out.check("byte-identical rerun", same)


@timed(5, "top-i law verification", 120.0)
def criterion_5(out: Outcome) -> None:
    v2, _ = integrate.dblquad(lambda x2, x1: top_i_pdf(GUMBEL, (x1, x2)), -4.0, 30.0,
                              lambda x1: -4.0, lambda x1: x1, epsabs=1e-9)
    out.check("2-d PDF mass", abs(v2 - 1.0) <= 1e-3, f"{v2:.6f}")
    v3, _ = integrate.tplquad(lambda x3, x2, x1: top_i_pdf(GUMBEL, (x1, x2, x3)), -4.0, 25.0,
                              lambda x1: -4.0, lambda x1: x1,
                              lambda x1, x2: -4.0, lambda x1, x2: x2, epsabs=1e-7, epsrel=1e-7)
    out.check("3-d PDF mass", abs(v3 - 1.0) <= 1e-3, f"{v3:.6f}")

    # Top two of n = 10^4 exponentials drawn exactly from uniform order statistics.
    n, pairs = 10_000, 100_000
    rng = np.random.default_rng(5)
    u1 = rng.random(pairs) ** (1.0 / n)
    u2 = u1 * rng.random(pairs) ** (1.0 / (n - 1))
    m1, m2 = -np.log1p(-u1) - math.log(n), -np.log1p(-u2) - math.log(n)
    mc = float(np.mean((m1 <= 1.0) & (m2 <= 0.0)))
    cdf = top_i_cdf(GUMBEL, (1.0, 0.0))
    out.check("top-2 CDF vs Monte Carlo", abs(cdf - mc) <= 0.01, f"{cdf:.4f} vs {mc:.4f}")
    pdf = top_i_pdf(GUMBEL, (1.0, 0.0))
    out.check("PDF hand value", abs(pdf - math.exp(-2)) <= 1e-9, f"{pdf:.12f}")


@timed(6, "penultimate dominance", 60.0)
def criterion_6(out: Outcome) -> None:
    for n in (100, 1000):
        rep = penultimate_fit(ParentModel("normal"), n)
        ok = rep.sup_distance_penultimate < rep.sup_distance_ultimate and rep.penultimate_shape < 0
        out.check(f"normal n={n}", ok,
                  f"ultimate {rep.sup_distance_ultimate:.5f}, penultimate {rep.sup_distance_penultimate:.5f} "
                  f"at shape {rep.penultimate_shape:.4f}")


@timed(7, "extremal index", 120.0)
def criterion_7(out: Outcome) -> None:
    iid = []
    for s in range(100):
        rng = np.random.default_rng(s)
        iid.append(blocks_ei(-1.0 / np.log(rng.random(100_000))).theta_hat)
    med = float(np.median(iid))
    out.check("i.i.d. Frechet blocks", abs(med - 1.0) <= 0.1, f"median {med:.3f}")

    ratios = []
    for s in range(20):
        x = armax_sample(0.5, 100_000, seed=s)
        ratios.append(ei_probability_ratio(x, empirical_threshold(x, 0.999)).theta_hat)
    med = float(np.median(ratios))
    out.check("ARMAX alpha=0.5", abs(med - 0.5) <= 0.1, f"median {med:.3f}")

    series = np.zeros(100)
    series[:3] = 5.0
    theta = blocks_ei(series, 10, 1.0).theta_hat
    out.check("hand count", abs(theta - 1 / 3) <= 1e-15, f"{theta:.6f}")


@timed(8, "CLI contract", 10.0)
def criterion_8(out: Outcome) -> None:
    import os
    import tempfile

    runner = CliRunner()
    with tempfile.TemporaryDirectory() as tmp:
        hand = os.path.join(tmp, "hand.txt")
        with open(hand, "w") as fh:
            fh.write("# hand example\n1\n" + "\n".join(repr(E**i) for i in (1, 2, 3)) + "\n")

        def row(*args):
            res = runner.invoke(cli_main, list(args))
            return json.loads(res.output)["rows"][0] if res.exit_code == 0 else None

        h = row("estimate", hand, "--method", "hill", "--k", "3")
        out.check("hill row", h == {"k": 3, "method": "hill", "estimate": 2.0}, str(h))
        m = row("estimate", hand, "--method", "moment", "--k", "2")
        out.check("moment row", m is not None and abs(m["estimate"] + 2.5) <= 1e-12)
        mm = row("estimate", hand, "--method", "mixed-moment", "--k", "2")
        out.check("mixed-moment row", mm is not None and abs(mm["estimate"] - 0.34193) <= 1e-5)
        mop = row("estimate", hand, "--method", "mop", "--p", "0", "--k", "3")
        out.check("mop(p=0) row equals hill", mop is not None and h is not None and mop["estimate"] == h["estimate"])

        sim = ["simulate", "--model", "hall-welsh:xi=1,beta=1,rho=-0.5", "--n", "500", "-R", "20",
               "--seed", "7", "--k", "10:200:10", "--format", "csv"]
        a, b = runner.invoke(cli_main, sim), runner.invoke(cli_main, sim)
        out.check("byte-identical campaign", a.exit_code == 0 and a.output == b.output)

        empty = os.path.join(tmp, "empty.txt")
        with open(empty, "w") as fh:
            fh.write("# nothing here\n")
        bad = os.path.join(tmp, "bad.txt")
        with open(bad, "w") as fh:
            fh.write("1\n2\nx\n")
        neg = os.path.join(tmp, "neg.txt")
        with open(neg, "w") as fh:
            fh.write("-3\n-2\n-1\n1\n2\n")
        codes = {
            "empty": runner.invoke(cli_main, ["estimate", empty]).exit_code,
            "malformed": runner.invoke(cli_main, ["estimate", bad]).exit_code,
            "bad model": runner.invoke(cli_main, ["simulate", "--model", "nope", "--n", "10", "--seed", "1"]).exit_code,
            "no seed": runner.invoke(cli_main, ["simulate", "--model", "pareto:xi=1", "--n", "10"]).exit_code,
            "nonpositive": runner.invoke(cli_main, ["estimate", neg, "--k", "3"]).exit_code,
        }
        expected = {"empty": 2, "malformed": 2, "bad model": 2, "no seed": 2, "nonpositive": 3}
        out.check("exit codes", codes == expected, str(codes))
        line_msg = runner.invoke(cli_main, ["estimate", bad]).output
        out.check("line-numbered message", ":3:" in line_msg)
        helptext = runner.invoke(cli_main, ["--help"]).output
        out.check("exit codes documented", all(f"{c}  " in helptext for c in (0, 2, 3, 4)))


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.slow
@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 9)])
def test_criterion(criterion, capsys):
    out = criterion()
    with capsys.disabled():
        print("\n" + out.line())
    assert out.passed, out.line()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    for r in results:
        print(r.line())
    raise SystemExit(0 if all(r.passed for r in results) else 1)
