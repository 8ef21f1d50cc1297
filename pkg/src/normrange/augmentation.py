"""Data-augmentation machinery: adjusted mean, centered bounds, the
zero-mean truncation location, and generation of the augmented sample."""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as k
from .core import require_valid
from .exceptions import DomainError, NumericalError

__all__ = [
    "AugmentationContext",
    "adjusted_mean",
    "centered_bounds",
    "solve_mu_trunc",
    "mu_trunc_explicit",
    "augment",
]


@dataclass(frozen=True)
class AugmentationContext:
    """Derived quantities shared by every augmentation step for fixed stats."""

    x_bar_adj: float
    a_star: float
    b_star: float
    n_missing: int

    @classmethod
    def from_stats(cls, stats):
        adj = adjusted_mean(stats)
        return cls(
            x_bar_adj=adj,
            a_star=stats.min - adj,
            b_star=stats.max - adj,
            n_missing=stats.n - 2,
        )


def adjusted_mean(stats):
    """Mean of the unobserved interior values implied by the reported tuple."""
    if stats.n < 3:
        raise DomainError(f"adjusted mean needs n >= 3, got n={stats.n}")
    return (stats.n * stats.mean - stats.min - stats.max) / (stats.n - 2)


def centered_bounds(stats):
    """Truncation bounds re-centered at the adjusted mean."""
    adj = adjusted_mean(stats)
    return stats.min - adj, stats.max - adj


def solve_mu_trunc(sigma_sq, a_star, b_star):
    """Location making the truncated normal on [a_star, b_star] zero-mean.

    The truncated mean is strictly increasing in the location, so the root
    is unique; it is found by bisection.
    """
    if not sigma_sq > 0.0:
        raise DomainError(f"sigma_sq must be positive, got {sigma_sq}")
    if not a_star < b_star:
        raise DomainError(f"need a_star < b_star, got [{a_star}, {b_star}]")
    sigma = math.sqrt(sigma_sq)
    m, ok = k._solve_mu_trunc(sigma, a_star, b_star)
    if not ok:
        raise NumericalError(
            "zero-mean truncation location not bracketable within "
            f"[{a_star - 50 * sigma}, {b_star + 50 * sigma}] "
            f"(sigma={sigma}, bounds=[{a_star}, {b_star}])"
        )
    return m


def mu_trunc_explicit(sigma_sq, a_star, b_star):
    """One-shot location formula evaluated at location zero.

    First-order variant of ``solve_mu_trunc``; kept for ablation, not used
    by the Gibbs sampler.
    """
    if not sigma_sq > 0.0:
        raise DomainError(f"sigma_sq must be positive, got {sigma_sq}")
    sigma = math.sqrt(sigma_sq)
    return -sigma * k._trunc_ratio(a_star / sigma, b_star / sigma)


def augment(gen, stats, sigma_sq):
    """One augmented sample of length n: observed endpoints plus n-2 interior
    draws whose expectation keeps the overall mean calibrated to stats.mean."""
    require_valid(stats)
    if not sigma_sq > 0.0:
        raise DomainError(f"sigma_sq must be positive, got {sigma_sq}")
    ctx = AugmentationContext.from_stats(stats)
    m = solve_mu_trunc(sigma_sq, ctx.a_star, ctx.b_star)
    sigma = math.sqrt(sigma_sq)
    x = np.empty(stats.n)
    x[0] = stats.min
    x[-1] = stats.max
    interior = x[1:-1]
    k._truncnorm_fill(gen, m, sigma, ctx.a_star, ctx.b_star, interior)
    interior += ctx.x_bar_adj
    np.clip(interior, stats.min, stats.max, out=interior)
    return x
