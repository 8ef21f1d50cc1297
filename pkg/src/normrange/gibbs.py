"""Five-step Gibbs sampler with truncated-normal data augmentation."""

import math

import numpy as np

from . import _kernels as k
from .augmentation import AugmentationContext
from .core import Chain, require_valid
from .distributions import make_rng
from .exceptions import NumericalError

__all__ = [
    "sample_mu_conditional",
    "sample_sigma_sq_conditional",
    "run_gibbs",
    "resolve_init",
]


def resolve_init(stats, config):
    """Initial (mu, sigma^2): user-supplied values, or mean and the
    range-rule-of-thumb variance ((max - min) / 4)^2."""
    mu = stats.mean if config.init_mu == "auto" else float(config.init_mu)
    if config.init_sigma_sq == "auto":
        sigma_sq = ((stats.max - stats.min) / 4.0) ** 2
    else:
        sigma_sq = float(config.init_sigma_sq)
        if not sigma_sq > 0.0:
            raise ValueError(f"init_sigma_sq must be positive, got {sigma_sq}")
    return mu, sigma_sq


def sample_mu_conditional(gen, sigma_sq, stats, priors):
    """One draw of mu given sigma^2 and the observed sample mean."""
    post_var = 1.0 / (1.0 / priors.tau0_sq + stats.n / sigma_sq)
    post_mean = (priors.mu0 / priors.tau0_sq + stats.n * stats.mean / sigma_sq) * post_var
    return post_mean + math.sqrt(post_var) * k._std_normal(gen)


def sample_sigma_sq_conditional(gen, mu, x_star, priors):
    """One draw of sigma^2 given mu and the augmented sample."""
    x_star = np.asarray(x_star, dtype=float)
    n = x_star.size
    ss = float(np.sum((x_star - mu) ** 2))
    shape = priors.alpha0 + 0.5 * n
    scale = priors.beta0 + 0.5 * ss
    return scale / k._gamma_sample(gen, shape)


def run_gibbs(stats, priors, config):
    """Run the augmented Gibbs sampler; returns a Chain of config.iterations
    (mu, sigma^2) draws, deterministic under the configured seed."""
    require_valid(stats)
    init_mu, init_sigma_sq = resolve_init(stats, config)
    ctx = AugmentationContext.from_stats(stats)
    gen = make_rng(config.seed)
    mu, sigma_sq, err_iter = k._gibbs_chain(
        gen,
        stats.n,
        stats.mean,
        stats.min,
        stats.max,
        ctx.x_bar_adj,
        ctx.a_star,
        ctx.b_star,
        priors.mu0,
        priors.tau0_sq,
        priors.alpha0,
        priors.beta0,
        config.iterations,
        init_mu,
        init_sigma_sq,
        config.condition_on_augmented_mean,
    )
    if err_iter >= 0:
        raise NumericalError(
            f"augmentation failed at iteration {err_iter}: zero-mean "
            "truncation location not bracketable"
        )
    return Chain(mu=mu, sigma_sq=sigma_sq, config=config)
