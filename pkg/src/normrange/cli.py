"""Command-line front end: one-shot estimation, simulation-study runs, and
method comparison, with JSON/CSV output for downstream tooling.

Exit codes are a stable contract: 0 success, 2 validation/usage error,
3 numerical error, 4 I/O error.
"""

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .core import Priors, SamplerConfig, summarize
from .exceptions import NormRangeError, ValidationError
from .gibbs import run_gibbs
from .reference import run_metropolis
from .simulation import (
    Scenario,
    aggregate,
    compare_methods,
    emit_report,
    run_replicates,
)
from .core import SummaryStats

SCHEMA_VERSION = 1
OUTPUT_DIR_ENV = "NORMRANGE_OUTPUT_DIR"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_SAMPLER_KEYS = ("iterations", "burn_in", "thin", "seed", "method",
                 "mh_step_scale", "init_mu", "init_sigma_sq")
_PRIOR_KEYS = ("mu0", "tau0_sq", "alpha0", "beta0")

_DEFAULTS = {
    "iterations": 10_000,
    "burn_in": 5_000,
    "thin": 1,
    "seed": None,
    "method": "gibbs",
    "mh_step_scale": 1.0,
    "init_mu": "auto",
    "init_sigma_sq": "auto",
    "mu0": 0.0,
    "tau0_sq": 1e4,
    "alpha0": 2.0,
    "beta0": 2.0,
    "true_mu": 0.0,
    "true_sigma": 5.0,
    "sizes": "10,50,100,500,1000",
    "replicates": 20,
    "methods": "gibbs,metropolis",
    "workers": os.cpu_count() or 1,
    "format": "json",
}


def _add_sampler_flags(p):
    p.add_argument("--iterations", type=int, default=None,
                   help=f"MCMC iterations (default {_DEFAULTS['iterations']})")
    p.add_argument("--burn-in", dest="burn_in", type=int, default=None,
                   help=f"burn-in iterations discarded (default {_DEFAULTS['burn_in']})")
    p.add_argument("--thin", type=int, default=None,
                   help=f"thinning stride (default {_DEFAULTS['thin']})")
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: drawn from entropy and printed)")
    p.add_argument("--mh-step-scale", dest="mh_step_scale", type=float, default=None,
                   help=f"Metropolis step multiplier (default {_DEFAULTS['mh_step_scale']})")
    p.add_argument("--mu0", type=float, default=None,
                   help=f"prior mean of mu (default {_DEFAULTS['mu0']})")
    p.add_argument("--tau0-sq", dest="tau0_sq", type=float, default=None,
                   help=f"prior variance of mu (default {_DEFAULTS['tau0_sq']})")
    p.add_argument("--alpha0", type=float, default=None,
                   help=f"inverse-gamma prior shape (default {_DEFAULTS['alpha0']})")
    p.add_argument("--beta0", type=float, default=None,
                   help=f"inverse-gamma prior scale (default {_DEFAULTS['beta0']})")
    p.add_argument("--config", default=None,
                   help="JSON config file; explicit flags override file values")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="normrange",
        description="Bayesian estimation of normal parameters from "
                    "(n, mean, min, max) summary statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate from one reported tuple")
    est.add_argument("--n", type=int, required=True, help="sample size")
    est.add_argument("--mean", type=float, required=True, help="sample mean")
    est.add_argument("--min", type=float, required=True, help="sample minimum")
    est.add_argument("--max", type=float, required=True, help="sample maximum")
    est.add_argument("--method", choices=["gibbs", "metropolis"], default=None,
                     help=f"sampler (default {_DEFAULTS['method']})")
    est.add_argument("--init-mu", dest="init_mu", default=None,
                     help="initial mu, or 'auto' (default auto)")
    est.add_argument("--init-sigma-sq", dest="init_sigma_sq", default=None,
                     help="initial sigma^2, or 'auto' (default auto)")
    est.add_argument("--format", choices=["json", "csv"], default=None,
                     help=f"output format (default {_DEFAULTS['format']})")
    est.add_argument("--output", default=None,
                     help="write the result document here as well as stdout")
    _add_sampler_flags(est)

    for name, help_text in (
        ("simulate", "reproduce the replicated simulation study"),
        ("compare", "simulate with both methods and compare RMSE"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--true-mu", dest="true_mu", type=float, default=None,
                       help=f"true mean (default {_DEFAULTS['true_mu']})")
        p.add_argument("--true-sigma", dest="true_sigma", type=float, default=None,
                       help=f"true standard deviation (default {_DEFAULTS['true_sigma']})")
        p.add_argument("--sizes", default=None,
                       help=f"comma-separated sample sizes (default {_DEFAULTS['sizes']})")
        p.add_argument("--replicates", type=int, default=None,
                       help=f"replicates per size (default {_DEFAULTS['replicates']})")
        if name == "simulate":
            p.add_argument("--methods", default=None,
                           help=f"comma-separated methods (default {_DEFAULTS['methods']})")
        p.add_argument("--out", default=None,
                       help=f"output directory (default ${OUTPUT_DIR_ENV} "
                            "or ./normrange-results)")
        p.add_argument("--workers", type=int, default=None,
                       help=f"parallel workers (default {_DEFAULTS['workers']})")
        p.add_argument("--plots", action="store_true",
                       help="also write static SVG plots (needs matplotlib)")
        p.add_argument("--format", choices=["json", "csv"], default=None,
                       help="comparison document format (compare only; "
                            f"default {_DEFAULTS['format']})")
        _add_sampler_flags(p)

    return parser


def _effective(args):
    """Merge defaults < config file < explicit flags."""
    eff = dict(_DEFAULTS)
    cfg_path = getattr(args, "config", None)
    if cfg_path:
        with open(cfg_path) as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(_DEFAULTS)
        if unknown:
            raise ValidationError([f"UNKNOWN_CONFIG_KEY:{k}" for k in sorted(unknown)])
        eff.update(file_cfg)
    for key in _DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            eff[key] = val
    if eff["seed"] is None:
        eff["seed"] = int(np.random.SeedSequence().generate_state(1, np.uint64)[0]
                          >> np.uint64(1))
        print(f"seed: {eff['seed']} (generated from entropy)", file=sys.stderr)
    return eff


def _maybe_number(value):
    if value == "auto":
        return "auto"
    return float(value)


def _sampler_config(eff, method=None):
    return SamplerConfig(
        iterations=int(eff["iterations"]),
        burn_in=int(eff["burn_in"]),
        seed=int(eff["seed"]),
        init_mu=_maybe_number(eff["init_mu"]),
        init_sigma_sq=_maybe_number(eff["init_sigma_sq"]),
        method=method or eff["method"],
        mh_step_scale=float(eff["mh_step_scale"]),
        thin=int(eff["thin"]),
    )


def _priors(eff):
    return Priors(mu0=float(eff["mu0"]), tau0_sq=float(eff["tau0_sq"]),
                  alpha0=float(eff["alpha0"]), beta0=float(eff["beta0"]))


def _config_echo(eff, config, priors):
    return {
        "iterations": config.iterations,
        "burn_in": config.burn_in,
        "thin": config.thin,
        "method": config.method,
        "mh_step_scale": config.mh_step_scale,
        "init_mu": config.init_mu,
        "init_sigma_sq": config.init_sigma_sq,
        "priors": {"mu0": priors.mu0, "tau0_sq": priors.tau0_sq,
                   "alpha0": priors.alpha0, "beta0": priors.beta0},
    }


def _param_doc(v):
    return {"post_mean": v.post_mean, "post_sd": v.post_sd,
            "ci_lower": v.ci_lower, "ci_upper": v.ci_upper,
            "ess": v.ess, "rhat": v.rhat}


def cmd_estimate(args):
    eff = _effective(args)
    stats = SummaryStats(n=args.n, mean=args.mean, min=args.min, max=args.max)
    priors = _priors(eff)
    config = _sampler_config(eff)
    if config.method == "gibbs":
        chain = run_gibbs(stats, priors, config)
    else:
        chain = run_metropolis(stats, priors, config)
    summary = summarize(chain)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "seed": config.seed,
        "mu": _param_doc(summary.mu),
        "sigma": _param_doc(summary.sigma),
        "diagnostics": {
            "n_retained": summary.n_retained,
            "acceptance_rate": chain.acceptance_rate,
            "warnings": list(chain.warnings),
        },
        "config": _config_echo(eff, config, priors),
    }
    if eff["format"] == "json":
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["param", "post_mean", "post_sd", "ci_lower", "ci_upper",
                    "ess", "rhat"])
        for name in ("mu", "sigma"):
            d = doc[name]
            w.writerow([name] + [format(d[c], ".10g") for c in
                                 ("post_mean", "post_sd", "ci_lower",
                                  "ci_upper", "ess", "rhat")])
        text = buf.getvalue()
    sys.stdout.write(text)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    return EXIT_OK


def _scenario(args, eff, methods):
    sizes = tuple(int(s) for s in str(eff["sizes"]).split(",") if s)
    return Scenario(
        true_mu=float(eff["true_mu"]),
        true_sigma=float(eff["true_sigma"]),
        sizes=sizes,
        replicates=int(eff["replicates"]),
        priors=_priors(eff),
        sampler=_sampler_config(eff, method=methods[0]),
        methods=methods,
        base_seed=int(eff["seed"]),
    )


def _out_dir(args):
    return args.out or os.environ.get(OUTPUT_DIR_ENV) or "normrange-results"


def _print_aggregate(agg):
    header = ["size", "method", "param", "rmse", "coverage", "n_ok", "n_failed"]
    print("  ".join(f"{h:>10}" for h in header))
    for row in agg:
        cells = [row["size"], row["method"], row["param"],
                 f"{row['rmse']:.4f}", f"{row['coverage']:.3f}",
                 row["n_ok"], row["n_failed"]]
        print("  ".join(f"{c:>10}" for c in cells))


def cmd_simulate(args):
    eff = _effective(args)
    methods = tuple(m for m in str(eff["methods"]).split(",") if m)
    scenario = _scenario(args, eff, methods)
    results = run_replicates(scenario, workers=int(eff["workers"]))
    out_dir = _out_dir(args)
    written = emit_report(results, scenario, out_dir, plots=args.plots)
    _print_aggregate(aggregate(results, scenario))
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_compare(args):
    eff = _effective(args)
    scenario = _scenario(args, eff, ("gibbs", "metropolis"))
    results = run_replicates(scenario, workers=int(eff["workers"]))
    out_dir = _out_dir(args)
    written = emit_report(results, scenario, out_dir, plots=args.plots)
    comparison = compare_methods(aggregate(results, scenario))
    doc = {"schema_version": SCHEMA_VERSION, "base_seed": scenario.base_seed,
           "comparison": comparison}
    if eff["format"] == "json":
        path = os.path.join(out_dir, "comparison.json")
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        path = os.path.join(out_dir, "comparison.csv")
        cols = ["size", "param", "rmse_gibbs", "rmse_metropolis",
                "rel_diff", "flagged"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for row in comparison:
                w.writerow([row[c] for c in cols])
    written.append(path)
    for row in comparison:
        flag = "  <-- exceeds 30% agreement" if row["flagged"] else ""
        print(f"n={row['size']:>5}  {row['param']:>5}  "
              f"gibbs={row['rmse_gibbs']:.4f}  "
              f"metropolis={row['rmse_metropolis']:.4f}  "
              f"rel_diff={row['rel_diff']:.3f}{flag}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"estimate": cmd_estimate, "simulate": cmd_simulate,
                "compare": cmd_compare}
    try:
        return handlers[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NormRangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
