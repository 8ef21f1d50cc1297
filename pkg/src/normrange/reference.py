"""Order-statistic likelihood for the observed summary tuple, sampled with
random-walk Metropolis on the unconstrained (mu, log sigma^2) scale.

Serves as the in-repo reference method the augmented Gibbs sampler is
checked against.
"""

import math

import numpy as np

from . import _kernels as k
from .augmentation import adjusted_mean
from .core import Chain, FEASIBILITY_RTOL, require_valid
from .distributions import make_rng
from .exceptions import DomainError
from .gibbs import resolve_init

__all__ = [
    "log_min_density",
    "log_max_density",
    "log_likelihood",
    "log_posterior",
    "run_metropolis",
    "random_walk",
]

PILOT_ITERATIONS = 500
TARGET_ACCEPT = (0.20, 0.40)
# Scaling rule for 2-d random-walk proposals
STEP_FACTOR = 2.4 / math.sqrt(2.0)


def _check_args(n, sigma_sq):
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not sigma_sq > 0.0:
        raise DomainError(f"sigma_sq must be positive, got {sigma_sq}")


def log_min_density(x, n, mu, sigma_sq):
    """Log density of the minimum of n iid normal draws."""
    _check_args(n, sigma_sq)
    sigma = math.sqrt(sigma_sq)
    z = (x - mu) / sigma
    return (math.log(n) + (n - 1.0) * k._log_ndtr(-z)
            - 0.5 * z * z - math.log(sigma) - 0.5 * math.log(2.0 * math.pi))


def log_max_density(x, n, mu, sigma_sq):
    """Log density of the maximum of n iid normal draws."""
    _check_args(n, sigma_sq)
    sigma = math.sqrt(sigma_sq)
    z = (x - mu) / sigma
    return (math.log(n) + (n - 1.0) * k._log_ndtr(z)
            - 0.5 * z * z - math.log(sigma) - 0.5 * math.log(2.0 * math.pi))


def _log_tn_adjusted(stats, mu, sigma_sq):
    adj = adjusted_mean(stats)
    tol = FEASIBILITY_RTOL * (stats.max - stats.min)
    if adj < stats.min - tol or adj > stats.max + tol:
        return -math.inf
    s_adj = math.sqrt(sigma_sq / (stats.n - 2))
    za = (stats.min - mu) / s_adj
    zb = (stats.max - mu) / s_adj
    zx = (adj - mu) / s_adj
    return (-0.5 * zx * zx - math.log(s_adj) - 0.5 * math.log(2.0 * math.pi)
            - k._log_mass(za, zb))


def log_likelihood(stats, mu, sigma_sq):
    """Log of: TN density of the adjusted mean (variance sigma^2/(n-2),
    bounds [min, max]) times the min and max order-statistic densities."""
    _check_args(stats.n, sigma_sq)
    return (_log_tn_adjusted(stats, mu, sigma_sq)
            + log_min_density(stats.min, stats.n, mu, sigma_sq)
            + log_max_density(stats.max, stats.n, mu, sigma_sq))


def log_posterior(stats, priors, mu, log_sigma_sq):
    """Likelihood plus priors plus the log-scale Jacobian."""
    sigma_sq = math.exp(log_sigma_sq)
    lp = log_likelihood(stats, mu, sigma_sq)
    if lp == -math.inf:
        return lp
    dm = mu - priors.mu0
    lp += -0.5 * dm * dm / priors.tau0_sq \
        - 0.5 * math.log(2.0 * math.pi * priors.tau0_sq)
    lp += priors.alpha0 * math.log(priors.beta0) - math.lgamma(priors.alpha0) \
        - (priors.alpha0 + 1.0) * log_sigma_sq - priors.beta0 / sigma_sq
    lp += log_sigma_sq
    return lp


def random_walk(gen, log_post, x0, steps, iterations):
    """Generic symmetric random-walk Metropolis on a real vector.

    Returns (draws array of shape (iterations, dim), accept count).  Uses
    the same primitive normal draws as the compiled chain kernel.
    """
    x = np.asarray(x0, dtype=float).copy()
    steps = np.asarray(steps, dtype=float)
    dim = x.size
    out = np.empty((iterations, dim))
    lp = log_post(x)
    acc = 0
    for t in range(iterations):
        prop = x.copy()
        for i in range(dim):
            prop[i] += steps[i] * k._std_normal(gen)
        plp = log_post(prop)
        d = plp - lp
        if d >= 0.0 or gen.random() < math.exp(d):
            x = prop
            lp = plp
            acc += 1
        out[t] = x
    return out, acc


def _initial_steps(stats, config):
    sigma0 = (stats.max - stats.min) / 4.0
    step_mu = STEP_FACTOR * sigma0 / math.sqrt(stats.n) * config.mh_step_scale
    step_lss = STEP_FACTOR * math.sqrt(2.0 / stats.n) * config.mh_step_scale
    return step_mu, step_lss


def run_metropolis(stats, priors, config, log_post_fn=None):
    """Random-walk Metropolis chain on (mu, log sigma^2).

    A 500-iteration pilot phase rescales the proposal once toward 20-40%
    acceptance; the main kernel afterwards is non-adaptive.  ``log_post_fn``
    (signature ``(mu, log_sigma_sq) -> float``) substitutes the target for
    testing; the production path uses the compiled posterior kernel.
    """
    require_valid(stats)
    init_mu, init_sigma_sq = resolve_init(stats, config)
    lss = math.log(init_sigma_sq)
    step_mu, step_lss = _initial_steps(stats, config)
    gen = make_rng(config.seed)

    if log_post_fn is not None:
        def lp_vec(x):
            return log_post_fn(x[0], x[1])

        pilot, acc = random_walk(gen, lp_vec, (init_mu, lss),
                                 (step_mu, step_lss), PILOT_ITERATIONS)
        factor = _pilot_factor(acc / PILOT_ITERATIONS)
        draws, acc = random_walk(gen, lp_vec, pilot[-1],
                                 (step_mu * factor, step_lss * factor),
                                 config.iterations)
        mu = draws[:, 0]
        sigma_sq = np.exp(draws[:, 1])
        n_acc = acc
    else:
        adj = adjusted_mean(stats)
        args = (stats.n, adj, stats.min, stats.max,
                priors.mu0, priors.tau0_sq, priors.alpha0, priors.beta0)
        _, _, m_end, l_end, acc = k._rw_chain(
            gen, *args, PILOT_ITERATIONS, init_mu, lss, step_mu, step_lss)
        factor = _pilot_factor(acc / PILOT_ITERATIONS)
        mu, sigma_sq, _, _, n_acc = k._rw_chain(
            gen, *args, config.iterations, m_end, l_end,
            step_mu * factor, step_lss * factor)

    rate = n_acc / config.iterations
    warnings = []
    post = mu[config.burn_in:]
    if post.size > 1:
        post_rate = float(np.mean(post[1:] != post[:-1]))
        if post_rate < 0.01 or post_rate > 0.99:
            warnings.append(
                f"post-burn-in acceptance rate {post_rate:.4f} outside [0.01, 0.99]"
            )
    return Chain(mu=mu, sigma_sq=sigma_sq, config=config,
                 acceptance_rate=rate, warnings=tuple(warnings))


def _pilot_factor(acc):
    if TARGET_ACCEPT[0] <= acc <= TARGET_ACCEPT[1]:
        return 1.0
    return min(10.0, max(0.1, (acc + 0.02) / 0.3))
