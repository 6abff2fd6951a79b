"""Batch command-line front end.

Input files hold one number per line (UTF-8, ``#`` starts a comment, ``-``
reads stdin). Results go to stdout as JSON (``"schema": 1``) or CSV with 17
significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
from collections.abc import Callable, Sequence

import click
import numpy as np

from . import __version__
from .asymptotics import ParentModel, penultimate_fit
from .campaign import CAMPAIGN_METHODS, ModelSpec, run_campaign
from .cluster import armax_sample, blocks_ei, empirical_threshold
from .errors import EVTError, InvalidModelError, SelectionError
from .estimators import (
    gumbel_statistic,
    hill,
    mean_order_p_evi,
    mixed_moment,
    moment,
    power_mean_evi,
)
from .port import PortBase, PortConfig, port_evi, port_excesses
from .reduced_bias import estimate_second_order, mvrb_hill
from .resampling import BootstrapPlan, BootstrapTarget, bootstrap_osf
from .tail_stats import OrderedSample

SCHEMA_VERSION = 1
THREADS_ENV = "EVTKIT_THREADS"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_SELECTION = 4

EXIT_CODES_HELP = """\b
Exit codes:
  0  success
  2  input error (unreadable or malformed data, bad options, invalid model spec)
  3  numeric-domain error (estimator undefined for the data, e.g. nonpositive threshold)
  4  selection failure (bootstrap could not pick a tail level)
"""


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


def read_values(path: str) -> np.ndarray:
    """Parse one value per line; comments and blank lines are skipped."""
    try:
        if path == "-":
            text = sys.stdin.buffer.read().decode("utf-8")
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            v = float(body)
        except ValueError:
            raise InputError(f"{path}:{lineno}: not a number: {body!r}") from None
        if not math.isfinite(v):
            raise InputError(f"{path}:{lineno}: value must be finite, got {body!r}")
        values.append(v)
    if not values:
        raise InputError(f"{path}: no data values found")
    return np.array(values)


def read_sample(path: str) -> OrderedSample:
    values = read_values(path)
    if values.size < 2:
        raise InputError(f"{path}: need at least two values, got {values.size}")
    return OrderedSample.from_data(values, provenance=os.path.basename(path))


def parse_k_range(spec: str | None, n: int) -> list[int]:
    """``a:b:step``, ``a:b`` or a single ``k``; default 2..floor(n/2)."""
    if spec is None:
        return list(range(2, n // 2 + 1)) or [1]
    parts = spec.split(":")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise InputError(f"bad k range {spec!r}; expected a:b:step") from None
    if len(nums) == 1:
        ks = nums
    elif len(nums) in (2, 3):
        step = nums[2] if len(nums) == 3 else 1
        if step < 1:
            raise InputError("k step must be positive")
        ks = list(range(nums[0], nums[1] + 1, step))
    else:
        raise InputError(f"bad k range {spec!r}; expected a:b:step")
    if not ks:
        raise InputError(f"k range {spec!r} is empty")
    return ks


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return "" if v is None else str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        v = float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def emit(command: str, header: Sequence[str], rows: list[list], fmt: str, extra: dict | None = None) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        click.echo(buf.getvalue(), nl=False)
        return
    doc = {"schema": SCHEMA_VERSION, "command": command, **(extra or {})}
    doc["rows"] = [dict(zip(header, row)) for row in rows]
    click.echo(json.dumps(_jsonable(doc), indent=2, allow_nan=False))


def _run(fn: Callable[[], None]) -> None:
    """Translate library errors into the documented exit codes."""
    try:
        fn()
    except click.ClickException:
        raise
    except InvalidModelError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    except SelectionError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_SELECTION)
    except EVTError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_NUMERIC)


format_option = click.option(
    "--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True
)
k_option = click.option("--k", "k_spec", default=None, help="Tail levels a:b:step (default 2:floor(n/2):1).")


@click.group(epilog=EXIT_CODES_HELP, context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__)
def main() -> None:
    """Semi-parametric extreme value analysis: tail index estimation,
    bias reduction, tail-level selection and convergence diagnostics."""


ESTIMATORS = {
    "hill": lambda s, k, p: hill(s, k),
    "moment": lambda s, k, p: moment(s, k),
    "mixed-moment": lambda s, k, p: mixed_moment(s, k),
    "pme": lambda s, k, p: power_mean_evi(s, k, p),
    "mop": lambda s, k, p: mean_order_p_evi(s, k, p),
}


@main.command(epilog=EXIT_CODES_HELP)
@click.argument("input_path", metavar="INPUT")
@click.option("--method", type=click.Choice(sorted(ESTIMATORS)), default="hill", show_default=True)
@click.option("--p", "p", type=float, default=None, help="Order for pme (default 1) or mop (default 0).")
@k_option
@click.option("--mvrb", is_flag=True, help="Add the bias-corrected Hill column.")
@format_option
def estimate(input_path, method, p, k_spec, mvrb, fmt):
    """Estimate the extreme value index over a sweep of tail levels."""

    def go():
        sample = read_sample(input_path)
        ks = parse_k_range(k_spec, sample.n)
        order = p if p is not None else (1.0 if method == "pme" else 0.0)
        so = estimate_second_order(sample) if mvrb else None
        header = ["k", "method", "estimate"] + (["mvrb"] if mvrb else [])
        rows = []
        for k in ks:
            est = ESTIMATORS[method](sample, k, order)
            row = [k, method, est.value]
            if so is not None:
                row.append(mvrb_hill(sample, k, so).value)
            rows.append(row)
        extra = {"n": sample.n, "method": method}
        if method in ("pme", "mop"):
            extra["p"] = order
        if so is not None:
            extra["second_order"] = {"rho_hat": so.rho_hat, "beta_hat": so.beta_hat, "k_high": so.k_high}
        emit("estimate", header, rows, fmt, extra)

    _run(go)


@main.command(epilog=EXIT_CODES_HELP)
@click.argument("input_path", metavar="INPUT")
@click.option("--s", "s", type=float, default=0.1, show_default=True, help="Quantile level of the random threshold.")
@click.option("--base", type=click.Choice([b.value for b in PortBase]), default="hill", show_default=True)
@k_option
@format_option
def port(input_path, s, base, k_spec, fmt):
    """Location-invariant estimates from excesses over an empirical quantile."""

    def go():
        sample = read_sample(input_path)
        cfg = PortConfig(s)
        m = port_excesses(sample, cfg).n
        ks = parse_k_range(k_spec, m)
        rows = [[k, f"port-{base}", port_evi(sample, cfg, k, base).value] for k in ks]
        emit("port", ["k", "method", "estimate"], rows, fmt,
             {"n": sample.n, "s": s, "n_excesses": m, "flags": list(cfg.flags)})

    _run(go)


@main.command("bootstrap-k", epilog=EXIT_CODES_HELP)
@click.argument("input_path", metavar="INPUT")
@click.option("--estimator", type=click.Choice([t.value for t in BootstrapTarget]), default="hill", show_default=True)
@click.option("--p", "p", type=float, default=0.0, show_default=True, help="Order for mop.")
@click.option("--replicates", "-B", type=int, default=250, show_default=True)
@click.option("--seed", type=int, required=True)
@format_option
def bootstrap_k(input_path, estimator, p, replicates, seed, fmt):
    """Pick the tail level by the double bootstrap."""

    def go():
        sample = read_sample(input_path)
        try:
            plan = BootstrapPlan.default(sample.n, seed, replicates)
        except EVTError as exc:
            raise InputError(str(exc)) from None
        res = bootstrap_osf(sample, estimator, plan, p=p, workers=thread_count())
        row = [res.k_hat, res.k1_star, res.k2_star, res.estimate.value, res.c_factor,
               res.rho_hat if res.rho_hat is not None else math.nan]
        emit("bootstrap-k", ["k_hat", "k1_star", "k2_star", "estimate", "c_factor", "rho_hat"], [row], fmt,
             {"n": sample.n, "estimator": estimator, "n1": plan.n1, "n2": plan.n2,
              "replicates": replicates, "seed": seed})

    _run(go)


@main.command(epilog=EXIT_CODES_HELP)
@click.option("--model", "model_text", required=True,
              help="Synthetic model, e.g. hall-welsh:xi=1,beta=1,rho=-0.5 or pareto:xi=0.5.")
@click.option("--n", "n", type=int, required=True)
@click.option("--replicates", "-R", type=int, default=100, show_default=True)
@click.option("--seed", type=int, required=True)
@k_option
@click.option("--methods", default="hill,mvrb", show_default=True,
              help=f"Comma-separated subset of {','.join(CAMPAIGN_METHODS)}.")
@click.option("--p", "p", type=float, default=0.0, show_default=True, help="Order for mop.")
@format_option
def simulate(model_text, n, replicates, seed, k_spec, methods, p, fmt):
    """Monte Carlo campaign: summaries of estimator paths over k."""

    def go():
        spec = ModelSpec.parse(model_text)
        if n < 4:
            raise InputError("--n must be at least 4")
        ks = parse_k_range(k_spec, n)
        meths = tuple(m.strip() for m in methods.split(",") if m.strip())
        bad = [m for m in meths if m not in CAMPAIGN_METHODS]
        if bad or not meths:
            raise InputError(f"unknown methods {bad}; choose from {CAMPAIGN_METHODS}")
        res = run_campaign(spec, n, replicates, seed, ks, meths, p, workers=thread_count())
        emit("simulate", res.header(), list(res.rows()), fmt,
             {"model": res.model, "n": n, "replicates": replicates, "seed": seed})

    _run(go)


@main.command(epilog=EXIT_CODES_HELP)
@click.argument("input_path", metavar="INPUT", required=False)
@click.option("--armax", "alpha", type=float, default=None, help="Simulate an ARMAX series with this alpha instead of reading INPUT.")
@click.option("--n", "n", type=int, default=100_000, show_default=True, help="Series length for --armax.")
@click.option("--seed", type=int, default=None, help="Required with --armax.")
@click.option("--block-len", type=int, default=None, help="Block length (default floor(sqrt(n))).")
@click.option("--level", type=float, default=0.995, show_default=True, help="Empirical quantile level of the threshold.")
@click.option("--threshold", type=float, default=None, help="Explicit threshold; overrides --level.")
@format_option
def ei(input_path, alpha, n, seed, block_len, level, threshold, fmt):
    """Blocks estimate of the extremal index of a time-ordered series."""

    def go():
        if alpha is not None:
            if seed is None:
                raise InputError("--seed is required with --armax")
            series = armax_sample(alpha, n, seed)
        elif input_path is None:
            raise InputError("give an INPUT file or --armax")
        else:
            series = read_values(input_path)
        thr = threshold if threshold is not None else empirical_threshold(series, level)
        res = blocks_ei(series, block_len, thr)
        emit("ei", ["theta_hat", "block_len", "threshold", "exceedances"],
             [[res.theta_hat, res.block_len, res.threshold, res.exceedance_count]], fmt,
             {"n": int(len(series))})

    _run(go)


@main.command(epilog=EXIT_CODES_HELP)
@click.option("--model", "model_text", required=True, help="normal, exponential, uniform or frechet:<alpha>.")
@click.option("--n", "n_list", required=True, help="Comma-separated sample sizes.")
@format_option
def converge(model_text, n_list, fmt):
    """Ultimate versus penultimate sup-distance for the maximum of n draws."""

    def go():
        model = ParentModel.parse(model_text)
        ns = parse_int_list(n_list)
        if not ns:
            raise InputError("--n needs at least one sample size")
        rows = []
        for n in ns:
            rep = penultimate_fit(model, n)
            rows.append([n, rep.constants.a_n, rep.constants.b_n, rep.ultimate_shape,
                         rep.sup_distance_ultimate, rep.penultimate_shape, rep.sup_distance_penultimate])
        emit("converge",
             ["n", "a_n", "b_n", "ultimate_shape", "sup_distance_ultimate", "penultimate_shape",
              "sup_distance_penultimate"], rows, fmt, {"model": str(model)})

    _run(go)


@main.command("choose-model", epilog=EXIT_CODES_HELP)
@click.argument("input_path", metavar="INPUT")
@format_option
def choose_model(input_path, fmt):
    """Gumbel's W statistic for judging the tail type of the sample."""

    def go():
        sample = read_sample(input_path)
        w = gumbel_statistic(sample)
        emit("choose-model", ["n", "W"], [[sample.n, w]], fmt)

    _run(go)


if __name__ == "__main__":
    main()
