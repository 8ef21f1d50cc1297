"""Domain types, input validation, and chain summarization."""

import math
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import ValidationError

__all__ = [
    "SummaryStats",
    "Priors",
    "SamplerConfig",
    "Chain",
    "ParamSummary",
    "PosteriorSummary",
    "N_TOO_SMALL",
    "MIN_GE_MAX",
    "MEAN_OUT_OF_RANGE",
    "INFEASIBLE_ADJ_MEAN",
    "validate",
    "require_valid",
    "summarize",
    "ess_geyer",
    "split_rhat",
]

N_TOO_SMALL = "N_TOO_SMALL"
MIN_GE_MAX = "MIN_GE_MAX"
MEAN_OUT_OF_RANGE = "MEAN_OUT_OF_RANGE"
INFEASIBLE_ADJ_MEAN = "INFEASIBLE_ADJ_MEAN"

# Published statistics are rounded; allow the adjusted mean to exceed the
# bounds by this relative slack before declaring the tuple infeasible.
FEASIBILITY_RTOL = 1e-9


@dataclass(frozen=True)
class SummaryStats:
    """The observed tuple: sample size, mean, minimum, maximum."""

    n: int
    mean: float
    min: float
    max: float


@dataclass(frozen=True)
class Priors:
    """Normal prior on the mean, inverse-gamma prior on the variance."""

    mu0: float = 0.0
    tau0_sq: float = 1e4
    alpha0: float = 2.0
    beta0: float = 2.0

    def __post_init__(self):
        for name in ("tau0_sq", "alpha0", "beta0"):
            v = getattr(self, name)
            if not v > 0.0:
                raise ValueError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class SamplerConfig:
    iterations: int = 10_000
    burn_in: int = 5_000
    seed: int = 0
    init_mu: float | str = "auto"
    init_sigma_sq: float | str = "auto"
    method: str = "gibbs"
    mh_step_scale: float = 1.0
    thin: int = 1
    # experimental: condition the mean update on mean(x*) instead of the
    # observed sample mean
    condition_on_augmented_mean: bool = False

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError("burn_in must satisfy 0 <= burn_in < iterations")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.method not in ("gibbs", "metropolis"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.mh_step_scale > 0.0:
            raise ValueError("mh_step_scale must be positive")

    def with_seed(self, seed):
        return replace(self, seed=int(seed))


@dataclass(frozen=True)
class Chain:
    """Posterior draws of (mu, sigma^2) plus run metadata."""

    mu: np.ndarray
    sigma_sq: np.ndarray
    config: SamplerConfig
    acceptance_rate: float | None = None
    warnings: tuple = ()

    def __post_init__(self):
        if self.mu.shape != self.sigma_sq.shape:
            raise ValueError("mu and sigma_sq draws must have equal length")

    def __len__(self):
        return self.mu.shape[0]

    def retained(self):
        """Post-burn-in, thinned draws as (mu, sigma_sq) arrays."""
        sl = slice(self.config.burn_in, None, self.config.thin)
        return self.mu[sl], self.sigma_sq[sl]


@dataclass(frozen=True)
class ParamSummary:
    post_mean: float
    post_sd: float
    ci_lower: float
    ci_upper: float
    ess: float
    rhat: float


@dataclass(frozen=True)
class PosteriorSummary:
    """Summaries for mu and for sigma (reported on the sigma scale)."""

    mu: ParamSummary
    sigma: ParamSummary
    n_retained: int


def adjusted_mean_value(n, mean, minimum, maximum):
    return (n * mean - minimum - maximum) / (n - 2)


def validate(stats):
    """Check the input invariants; returns a list of violation codes.

    Total over finite inputs: never raises, an empty list means valid.
    """
    codes = []
    if stats.n < 3:
        codes.append(N_TOO_SMALL)
    if not stats.min < stats.max:
        codes.append(MIN_GE_MAX)
    if not (stats.min <= stats.mean <= stats.max):
        codes.append(MEAN_OUT_OF_RANGE)
    if stats.n >= 3 and stats.min < stats.max:
        adj = adjusted_mean_value(stats.n, stats.mean, stats.min, stats.max)
        tol = FEASIBILITY_RTOL * (stats.max - stats.min)
        if not (stats.min - tol <= adj <= stats.max + tol):
            codes.append(INFEASIBLE_ADJ_MEAN)
    return codes


def require_valid(stats):
    codes = validate(stats)
    if codes:
        raise ValidationError(codes)
    return stats


def ess_geyer(x):
    """Effective sample size via the initial-positive-sequence truncation.

    Clamped to (0, len(x)]; a constant chain reports full size.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    xm = x - x.mean()
    var0 = float(np.dot(xm, xm)) / n
    if var0 == 0.0 or n < 4:
        return float(n)
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(xm, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[:n].real / n
    rho = acov / acov[0]
    tau = 1.0
    t = 1
    while t + 1 < n:
        pair = rho[t] + rho[t + 1]
        if pair <= 0.0:
            break
        tau += 2.0 * pair
        t += 2
    return float(min(n, max(n / tau, 1e-12)))


def split_rhat(x):
    """Split-chain potential scale reduction from a single chain."""
    x = np.asarray(x, dtype=float)
    half = x.size // 2
    if half < 2:
        return float("nan")
    c1 = x[:half]
    c2 = x[half:2 * half]
    w = 0.5 * (c1.var(ddof=1) + c2.var(ddof=1))
    if w == 0.0:
        return 1.0
    m1, m2 = c1.mean(), c2.mean()
    grand = 0.5 * (m1 + m2)
    b = half * ((m1 - grand) ** 2 + (m2 - grand) ** 2)  # ddof=1 over 2 chains
    var_plus = (half - 1) / half * w + b / half
    return float(math.sqrt(var_plus / w))


def _param_summary(draws):
    mean = float(draws.mean())
    sd = float(draws.std(ddof=1)) if draws.size > 1 else 0.0
    lo, hi = np.quantile(draws, [0.025, 0.975])
    return ParamSummary(
        post_mean=mean,
        post_sd=sd,
        ci_lower=float(lo),
        ci_upper=float(hi),
        ess=ess_geyer(draws),
        rhat=split_rhat(draws),
    )


def summarize(chain, min_retained=100):
    """Posterior mean/SD/equal-tailed 95% interval, ESS, and split-R-hat.

    Sigma summaries are computed from the square root of the sigma^2 draws.
    """
    mu, sigma_sq = chain.retained()
    if mu.size < min_retained:
        raise ValueError(
            f"only {mu.size} retained draws; need at least {min_retained} "
            "for stable quantiles"
        )
    return PosteriorSummary(
        mu=_param_summary(mu),
        sigma=_param_summary(np.sqrt(sigma_sq)),
        n_retained=int(mu.size),
    )
