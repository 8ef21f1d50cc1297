"""Seedable random-variate generation and density/CDF evaluation.

Covers the four families the samplers need: normal, truncated normal,
gamma and inverse gamma.  Randomness flows through numpy ``Generator``
objects backed by the Philox counter-based bit generator; independent
streams derive from ``(seed, stream)`` via ``SeedSequence`` spawn keys.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from . import _kernels as k
from .exceptions import DomainError, FarTailError

__all__ = [
    "make_rng",
    "derived_seed",
    "TruncatedNormalParams",
    "normal_pdf",
    "normal_cdf",
    "normal_quantile",
    "truncated_normal_pdf",
    "truncated_normal_cdf",
    "truncated_normal_mean",
    "sample_truncated_normal",
    "sample_truncated_normal_many",
    "sample_gamma",
    "sample_inverse_gamma",
]

_SQRT2 = math.sqrt(2.0)
_LOG_UNDERFLOW = -700.0  # exp() underflows to 0 below roughly -745


def make_rng(seed, stream=0):
    """Philox generator for ``(seed, stream)``.

    Distinct stream indices under the same seed give disjoint streams;
    identical arguments reproduce the draw sequence bit-exactly.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


def derived_seed(*parts):
    """Deterministic 63-bit seed derived from a tuple of integers."""
    state = np.random.SeedSequence([int(p) for p in parts]).generate_state(1, np.uint64)
    return int(state[0] >> np.uint64(1))


@dataclass(frozen=True)
class TruncatedNormalParams:
    """Parent-normal location/variance plus truncation bounds ``a < b``."""

    mu: float
    sigma_sq: float
    a: float
    b: float

    def __post_init__(self):
        if not self.sigma_sq > 0.0:
            raise DomainError(f"sigma_sq must be positive, got {self.sigma_sq}")
        if not self.a < self.b:
            raise DomainError(f"bounds must satisfy a < b, got [{self.a}, {self.b}]")
        if math.isinf(self.a) and math.isinf(self.b):
            raise DomainError("at least one truncation bound must be finite")

    @property
    def sigma(self):
        return math.sqrt(self.sigma_sq)

    def standardized(self):
        s = self.sigma
        return (self.a - self.mu) / s, (self.b - self.mu) / s


def _check_sigma_sq(sigma_sq):
    if not sigma_sq > 0.0:
        raise DomainError(f"sigma_sq must be positive, got {sigma_sq}")


def normal_pdf(x, mu, sigma_sq):
    _check_sigma_sq(sigma_sq)
    s = math.sqrt(sigma_sq)
    return k._std_pdf((x - mu) / s) / s


def normal_cdf(x, mu, sigma_sq):
    _check_sigma_sq(sigma_sq)
    return k._std_cdf((x - mu) / math.sqrt(sigma_sq))


def normal_quantile(p, mu, sigma_sq):
    _check_sigma_sq(sigma_sq)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    return mu + math.sqrt(sigma_sq) * float(ndtri(p))


def _log_mass(params):
    alpha, beta = params.standardized()
    return k._log_mass(alpha, beta)


def truncated_normal_pdf(x, params):
    log_mass = _log_mass(params)
    if log_mass < _LOG_UNDERFLOW:
        raise FarTailError(
            "truncation mass underflows: bounds "
            f"[{params.a}, {params.b}] lie {params.standardized()} parent "
            "standard deviations from the location"
        )
    if x < params.a or x > params.b:
        return 0.0
    z = (x - params.mu) / params.sigma
    return math.exp(-0.5 * z * z - math.log(params.sigma)
                    - 0.5 * math.log(2.0 * math.pi) - log_mass)


def truncated_normal_cdf(x, params):
    """Closed-form CDF of the truncated normal (0 below ``a``, 1 above ``b``)."""
    if x <= params.a:
        return 0.0
    if x >= params.b:
        return 1.0
    alpha, beta = params.standardized()
    z = (x - params.mu) / params.sigma
    val = math.exp(k._log_mass(alpha, z) - k._log_mass(alpha, beta))
    return min(max(val, 0.0), 1.0)


def truncated_normal_mean(params):
    alpha, beta = params.standardized()
    m = params.mu + params.sigma * k._trunc_ratio(alpha, beta)
    if math.isnan(m):
        raise FarTailError(
            f"truncated mean undefined for bounds [{params.a}, {params.b}] "
            f"at mu={params.mu}, sigma_sq={params.sigma_sq}"
        )
    # guarantee the result lies strictly inside (a, b)
    lo = np.nextafter(params.a, params.b)
    hi = np.nextafter(params.b, params.a)
    return float(min(max(m, lo), hi))


def sample_truncated_normal(gen, params):
    alpha, beta = params.standardized()
    return params.mu + params.sigma * k._truncstd_sample(gen, alpha, beta)


def sample_truncated_normal_many(gen, params, size):
    out = np.empty(int(size))
    k._truncnorm_fill(gen, params.mu, params.sigma, params.a, params.b, out)
    return out


def sample_gamma(gen, shape, rate):
    if not shape > 0.0 or not rate > 0.0:
        raise DomainError(f"gamma needs shape, rate > 0; got {shape}, {rate}")
    return k._gamma_sample(gen, shape) / rate


def sample_inverse_gamma(gen, shape, scale):
    """Equal in distribution to 1 / sample_gamma(shape, rate=scale)."""
    if not shape > 0.0 or not scale > 0.0:
        raise DomainError(f"inverse gamma needs shape, scale > 0; got {shape}, {scale}")
    return scale / k._gamma_sample(gen, shape)
