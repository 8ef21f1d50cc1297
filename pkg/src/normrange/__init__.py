"""Bayesian estimation of normal-distribution parameters from the reported
sample size, mean, minimum and maximum.

Two estimators are provided: a Gibbs sampler that augments the unobserved
interior order statistics with truncated-normal draws, and a random-walk
Metropolis sampler on the order-statistic likelihood used as a reference.
"""

from ._kernels import NUMBA_ENABLED
from .core import (
    Chain,
    ParamSummary,
    PosteriorSummary,
    Priors,
    SamplerConfig,
    SummaryStats,
    summarize,
    validate,
)
from .distributions import make_rng
from .exceptions import (
    DomainError,
    FarTailError,
    NormRangeError,
    NumericalError,
    ValidationError,
)
from .gibbs import run_gibbs
from .reference import run_metropolis
from .simulation import Scenario, run_replicates

__version__ = "0.1.0"

__all__ = [
    "NUMBA_ENABLED",
    "Chain",
    "ParamSummary",
    "PosteriorSummary",
    "Priors",
    "SamplerConfig",
    "SummaryStats",
    "Scenario",
    "summarize",
    "validate",
    "make_rng",
    "run_gibbs",
    "run_metropolis",
    "run_replicates",
    "DomainError",
    "FarTailError",
    "NormRangeError",
    "NumericalError",
    "ValidationError",
    "__version__",
]
