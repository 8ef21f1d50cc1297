"""Simulation study: replicated estimation on synthetic normal data with
RMSE/coverage aggregation and CSV reporting."""

import csv
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .core import Priors, SamplerConfig, SummaryStats, summarize, validate
from .distributions import derived_seed, make_rng
from .exceptions import DomainError, NormRangeError
from .gibbs import run_gibbs
from .reference import run_metropolis

__all__ = [
    "Scenario",
    "ReplicateResult",
    "generate_dataset",
    "summarize_dataset",
    "run_replicates",
    "rmse",
    "coverage",
    "aggregate",
    "compare_methods",
    "emit_report",
    "TIDY_COLUMNS",
    "AGGREGATE_COLUMNS",
]

METHODS = ("gibbs", "metropolis")
DEFAULT_SIZES = (10, 50, 100, 500, 1000)

TIDY_COLUMNS = [
    "size", "replicate", "method", "param", "post_mean", "post_sd",
    "ci_lower", "ci_upper", "ess", "rhat", "seed", "wall_time_ms", "status",
]
AGGREGATE_COLUMNS = ["size", "method", "param", "rmse", "coverage", "n_ok", "n_failed"]

# Relative RMSE disagreement between methods above which a comparison cell
# is flagged
AGREEMENT_THRESHOLD = 0.30


@dataclass(frozen=True)
class Scenario:
    true_mu: float = 0.0
    true_sigma: float = 5.0
    sizes: tuple = DEFAULT_SIZES
    replicates: int = 20
    priors: Priors = field(default_factory=Priors)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    methods: tuple = METHODS
    base_seed: int = 20240501

    def __post_init__(self):
        if any(n < 3 for n in self.sizes):
            raise ValueError("all sizes must be >= 3")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if not self.true_sigma > 0:
            raise ValueError("true_sigma must be positive")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ValueError(f"unknown methods: {sorted(bad)}")


@dataclass(frozen=True)
class ReplicateResult:
    size: int
    replicate: int
    method: str
    seed: int
    wall_time_ms: float
    status: str  # "ok" or "failed:<reason>"
    summary: object = None  # PosteriorSummary when status == "ok"

    @property
    def ok(self):
        return self.status == "ok"


def generate_dataset(gen, n, mu, sigma):
    if n < 3:
        raise DomainError(f"n must be >= 3, got {n}")
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    return gen.normal(mu, sigma, size=int(n))


def summarize_dataset(samples):
    samples = np.asarray(samples, dtype=float)
    if samples.size < 3:
        raise DomainError(f"need at least 3 samples, got {samples.size}")
    return SummaryStats(
        n=int(samples.size),
        mean=float(samples.mean()),
        min=float(samples.min()),
        max=float(samples.max()),
    )


def _dataset_seed(scenario, size, replicate):
    # method-independent, so every method sees the same generated dataset
    return derived_seed(scenario.base_seed, size, replicate)


def _chain_seed(scenario, size, replicate, method):
    return derived_seed(scenario.base_seed, size, replicate,
                        1 + METHODS.index(method))


def run_cell(scenario, size, replicate, method):
    """One (size, replicate, method) cell, reproducible in isolation."""
    chain_seed = _chain_seed(scenario, size, replicate, method)
    t0 = time.perf_counter()
    try:
        data_gen = make_rng(_dataset_seed(scenario, size, replicate))
        data = generate_dataset(data_gen, size, scenario.true_mu, scenario.true_sigma)
        stats = summarize_dataset(data)
        codes = validate(stats)
        if codes:
            raise NormRangeError("degenerate dataset: " + ",".join(codes))
        config = replace(scenario.sampler, seed=chain_seed, method=method)
        if method == "gibbs":
            chain = run_gibbs(stats, scenario.priors, config)
        else:
            chain = run_metropolis(stats, scenario.priors, config)
        summary = summarize(chain)
        status, result_summary = "ok", summary
    except NormRangeError as exc:
        status, result_summary = f"failed:{exc}", None
    wall = (time.perf_counter() - t0) * 1000.0
    return ReplicateResult(
        size=size, replicate=replicate, method=method,
        seed=chain_seed, wall_time_ms=wall, status=status,
        summary=result_summary,
    )


def _run_cell_task(args):
    return run_cell(*args)


def run_replicates(scenario, workers=1):
    """All cells of the scenario, ordered by (size, replicate, method).

    Per-cell failures are recorded in the result row, never aborting the
    batch.  With workers > 1 cells run in separate processes.
    """
    tasks = [
        (scenario, size, rep, method)
        for size in scenario.sizes
        for rep in range(scenario.replicates)
        for method in scenario.methods
    ]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell_task, tasks, chunksize=1))
    else:
        results = [run_cell(*t) for t in tasks]
    results.sort(key=lambda r: (r.size, r.replicate, METHODS.index(r.method)))
    return results


def rmse(estimates, truth):
    estimates = np.asarray(estimates, dtype=float)
    if estimates.size == 0:
        raise ValueError("rmse needs at least one estimate")
    return float(np.sqrt(np.mean((estimates - truth) ** 2)))


def coverage(results, truth):
    """Fraction of (ci_lower, ci_upper) pairs containing the truth."""
    intervals = list(results)
    if not intervals:
        raise ValueError("coverage needs at least one interval")
    hits = sum(1 for lo, hi in intervals if lo <= truth <= hi)
    return hits / len(intervals)


def _param_view(summary, param):
    return summary.mu if param == "mu" else summary.sigma


def aggregate(results, scenario):
    """Per-(size, method, parameter) RMSE and coverage over replicate
    posterior means; sigma on the sigma scale."""
    rows = []
    for size in scenario.sizes:
        for method in scenario.methods:
            cell = [r for r in results if r.size == size and r.method == method]
            ok = [r for r in cell if r.ok]
            for param, truth in (("mu", scenario.true_mu),
                                 ("sigma", scenario.true_sigma)):
                if ok:
                    views = [_param_view(r.summary, param) for r in ok]
                    cell_rmse = rmse([v.post_mean for v in views], truth)
                    cell_cov = coverage(
                        [(v.ci_lower, v.ci_upper) for v in views], truth)
                else:
                    cell_rmse = math.nan
                    cell_cov = math.nan
                rows.append({
                    "size": size,
                    "method": method,
                    "param": param,
                    "rmse": cell_rmse,
                    "coverage": cell_cov,
                    "n_ok": len(ok),
                    "n_failed": len(cell) - len(ok),
                })
    return rows


def compare_methods(agg_rows):
    """Per-(size, param) RMSE of each method plus their relative difference
    (|a - b| over the mean), flagged above the agreement threshold."""
    by_key = {}
    for row in agg_rows:
        by_key.setdefault((row["size"], row["param"]), {})[row["method"]] = row
    out = []
    for (size, param), methods in sorted(by_key.items(),
                                         key=lambda kv: (kv[0][0], kv[0][1])):
        if "gibbs" not in methods or "metropolis" not in methods:
            continue
        rg = methods["gibbs"]["rmse"]
        rm = methods["metropolis"]["rmse"]
        denom = 0.5 * (rg + rm)
        rel = abs(rg - rm) / denom if denom > 0 else 0.0
        out.append({
            "size": size,
            "param": param,
            "rmse_gibbs": rg,
            "rmse_metropolis": rm,
            "rel_diff": rel,
            "flagged": rel > AGREEMENT_THRESHOLD,
        })
    return out


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".10g")
    return str(value)


def tidy_rows(results):
    """One row per (replicate, parameter)."""
    rows = []
    for r in results:
        for param in ("mu", "sigma"):
            if r.ok:
                v = _param_view(r.summary, param)
                metrics = [v.post_mean, v.post_sd, v.ci_lower, v.ci_upper,
                           v.ess, v.rhat]
            else:
                metrics = [None] * 6
            rows.append([r.size, r.replicate, r.method, param, *metrics,
                         r.seed, r.wall_time_ms, r.status])
    return rows


def emit_report(results, scenario, out_dir, plots=False):
    """Write tidy.csv and aggregate.csv (stable formatting), optionally
    static plots.  Returns the list of written paths."""
    if not results:
        raise ValueError("no results to report")
    os.makedirs(out_dir, exist_ok=True)
    written = []

    tidy_path = os.path.join(out_dir, "tidy.csv")
    with open(tidy_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TIDY_COLUMNS)
        for row in tidy_rows(results):
            w.writerow([_fmt(v) for v in row])
    written.append(tidy_path)

    agg = aggregate(results, scenario)
    agg_path = os.path.join(out_dir, "aggregate.csv")
    with open(agg_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(AGGREGATE_COLUMNS)
        for row in agg:
            w.writerow([_fmt(row[c]) for c in AGGREGATE_COLUMNS])
    written.append(agg_path)

    if plots:
        written.extend(_emit_plots(results, agg, scenario, out_dir))
    return written


def _emit_plots(results, agg, scenario, out_dir):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    truths = {"mu": scenario.true_mu, "sigma": scenario.true_sigma}

    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, param in zip(axes, ("mu", "sigma")):
        for method, marker in (("gibbs", "o"), ("metropolis", "s")):
            ok = [r for r in results if r.method == method and r.ok]
            if not ok:
                continue
            xs = [r.size for r in ok]
            views = [_param_view(r.summary, param) for r in ok]
            ys = [v.post_mean for v in views]
            err_lo = [v.post_mean - v.ci_lower for v in views]
            err_hi = [v.ci_upper - v.post_mean for v in views]
            ax.errorbar(xs, ys, yerr=[err_lo, err_hi], fmt=marker, ms=3,
                        alpha=0.5, linestyle="none", label=method)
        ax.axhline(truths[param], color="red", linestyle=":")
        ax.set_xscale("log")
        ax.set_xlabel("sample size")
        ax.set_title(param)
        ax.legend()
    fig.tight_layout()
    est_path = os.path.join(out_dir, "estimates.svg")
    fig.savefig(est_path)
    plt.close(fig)
    written.append(est_path)

    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, param in zip(axes, ("mu", "sigma")):
        for method in scenario.methods:
            rows = [r for r in agg if r["param"] == param and r["method"] == method]
            ax.plot([r["size"] for r in rows], [r["rmse"] for r in rows],
                    marker="o", label=method)
        ax.set_xscale("log")
        ax.set_xlabel("sample size")
        ax.set_ylabel("RMSE")
        ax.set_title(param)
        ax.legend()
    fig.tight_layout()
    rmse_path = os.path.join(out_dir, "rmse.svg")
    fig.savefig(rmse_path)
    plt.close(fig)
    written.append(rmse_path)
    return written
