"""Hot numeric kernels, numba-compiled by default.

Setting the environment variable ``NORMRANGE_DISABLE_NUMBA=1`` (before first
import) selects a pure-Python/numpy fallback.  Every kernel consumes
randomness exclusively through ``Generator.random()`` (raw uniform doubles),
so the compiled and fallback paths produce bit-identical draw streams from
the same generator state.

All samplers take a ``numpy.random.Generator`` as their first argument; the
package-level convention is a Philox (counter-based) bit generator, see
``distributions.make_rng``.
"""

import math
import os

import numpy as np

_DISABLE = os.environ.get("NORMRANGE_DISABLE_NUMBA", "").strip().lower() in {
    "1", "true", "yes", "on",
}

NUMBA_ENABLED = False
if not _DISABLE:
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass

if not NUMBA_ENABLED:
    def _njit(func):
        return func


def py_func(kernel):
    """Return the uncompiled Python version of a kernel (for benchmarks)."""
    return getattr(kernel, "py_func", kernel)


_SQRT2 = math.sqrt(2.0)
_LOG_2PI = math.log(2.0 * math.pi)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_TWO_PI = 2.0 * math.pi


@_njit
def _std_pdf(z):
    return _INV_SQRT_2PI * math.exp(-0.5 * z * z)


@_njit
def _std_cdf(z):
    return 0.5 * math.erfc(-z / _SQRT2)


@_njit
def _mills(z):
    # Mills ratio (1 - Phi(z)) / phi(z) via Laplace continued fraction;
    # accurate for z >= 6 where erfc-based evaluation underflows.
    f = 0.0
    for k in range(60, 0, -1):
        f = k / (z + f)
    return 1.0 / (z + f)


@_njit
def _log_ndtr(z):
    # log Phi(z), stable in both tails.
    if z == -math.inf:
        return -math.inf
    if z < -6.0:
        return -0.5 * z * z - 0.5 * _LOG_2PI + math.log(_mills(-z))
    if z > 6.0:
        return math.log1p(-_std_cdf(-z))
    return math.log(_std_cdf(z))


@_njit
def _log_mass(alpha, beta):
    # log(Phi(beta) - Phi(alpha)) for alpha < beta, using whichever tail
    # carries more mass to avoid catastrophic cancellation.
    if alpha + beta > 0.0:
        la = _log_ndtr(-alpha)
        lb = _log_ndtr(-beta)
    else:
        la = _log_ndtr(beta)
        lb = _log_ndtr(alpha)
    d = lb - la
    if d >= 0.0:
        return -math.inf
    return la + math.log1p(-math.exp(d))


@_njit
def _trunc_ratio(alpha, beta):
    # (phi(alpha) - phi(beta)) / (Phi(beta) - Phi(alpha)) for alpha < beta,
    # stable when both bounds sit in the same far tail.
    if alpha > 6.0:
        q = math.exp(-0.5 * (beta - alpha) * (beta + alpha))
        return (1.0 - q) / (_mills(alpha) - q * _mills(beta))
    if beta < -6.0:
        q = math.exp(-0.5 * (alpha - beta) * (alpha + beta))
        return -(1.0 - q) / (_mills(-beta) - q * _mills(-alpha))
    num = _std_pdf(alpha) - _std_pdf(beta)
    den = _std_cdf(beta) - _std_cdf(alpha)
    return num / den


@_njit
def _trunc_mean_loc(m, sigma, a, b):
    # Mean of TN(m, sigma^2, a, b).
    alpha = (a - m) / sigma
    beta = (b - m) / sigma
    return m + sigma * _trunc_ratio(alpha, beta)


@_njit
def _solve_mu_trunc(sigma, a, b):
    # Location m with TN(m, sigma^2, a, b) mean equal to zero; the truncated
    # mean is strictly increasing in m, so plain bisection is safe.  Returns
    # (m, ok); ok = False when the root is not bracketable in [a-50s, b+50s].
    lo = a - 50.0 * sigma
    hi = b + 50.0 * sigma
    flo = _trunc_mean_loc(lo, sigma, a, b)
    fhi = _trunc_mean_loc(hi, sigma, a, b)
    if not (flo <= 0.0 <= fhi):
        return 0.0, False
    tol = 1e-12 * max(sigma, 1.0)
    mid = 0.5 * (lo + hi)
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        fm = _trunc_mean_loc(mid, sigma, a, b)
        if abs(fm) <= tol:
            return mid, True
        if fm < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16 * (abs(mid) + sigma + 1.0):
            break
    return 0.5 * (lo + hi), True


@_njit
def _std_normal(gen):
    # Box-Muller from raw uniforms (cosine branch only), so the compiled and
    # fallback paths consume identical generator states.
    u1 = gen.random()
    while u1 <= 0.0:
        u1 = gen.random()
    u2 = gen.random()
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2)


# Truncated-normal rejection regimes (exposed for tests / diagnostics).
REGIME_NAIVE = 0
REGIME_EXPONENTIAL = 1
REGIME_UNIFORM = 2

_NAIVE_MASS = 0.01


@_njit
def _select_regime(alpha, beta):
    if _std_cdf(beta) - _std_cdf(alpha) >= _NAIVE_MASS:
        return REGIME_NAIVE
    if alpha >= 0.0 or beta <= 0.0:
        lo = alpha if alpha >= 0.0 else -beta
        hi = beta if alpha >= 0.0 else -alpha
        lam = 0.5 * (lo + math.sqrt(lo * lo + 4.0))
        if (hi - lo) * lam > 1.0:
            return REGIME_EXPONENTIAL
    return REGIME_UNIFORM


@_njit
def _truncstd_sample(gen, alpha, beta):
    # One draw from the standard normal truncated to [alpha, beta].
    if _std_cdf(beta) - _std_cdf(alpha) >= _NAIVE_MASS:
        while True:
            z = _std_normal(gen)
            if alpha <= z <= beta:
                return z
    if alpha >= 0.0 or beta <= 0.0:
        flip = beta <= 0.0
        lo = -beta if flip else alpha
        hi = -alpha if flip else beta
        lam = 0.5 * (lo + math.sqrt(lo * lo + 4.0))
        if (hi - lo) * lam > 1.0:
            # exponential-proposal rejection for a single far tail
            while True:
                z = lo - math.log1p(-gen.random()) / lam
                if z > hi:
                    continue
                d = z - lam
                if gen.random() <= math.exp(-0.5 * d * d):
                    return -z if flip else z
        # narrow far interval: uniform proposal
        while True:
            z = lo + (hi - lo) * gen.random()
            if gen.random() <= math.exp(0.5 * (lo * lo - z * z)):
                return -z if flip else z
    # interval straddles zero with tiny mass => it is narrow around zero
    while True:
        z = alpha + (beta - alpha) * gen.random()
        if gen.random() <= math.exp(-0.5 * z * z):
            return z


@_njit
def _truncnorm_fill(gen, mu, sigma, a, b, out):
    alpha = (a - mu) / sigma
    beta = (b - mu) / sigma
    for i in range(out.shape[0]):
        out[i] = mu + sigma * _truncstd_sample(gen, alpha, beta)


@_njit
def _gamma_sample(gen, shape):
    # Marsaglia-Tsang squeeze/rejection, unit rate; shape < 1 via boost.
    boost = 1.0
    s = shape
    if s < 1.0:
        u = gen.random()
        while u <= 0.0:
            u = gen.random()
        boost = u ** (1.0 / s)
        s += 1.0
    d = s - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = _std_normal(gen)
        t = 1.0 + c * x
        if t <= 0.0:
            continue
        v = t * t * t
        u = gen.random()
        x2 = x * x
        if u < 1.0 - 0.0331 * x2 * x2:
            return boost * d * v
        if u > 0.0 and math.log(u) < 0.5 * x2 + d * (1.0 - v + math.log(v)):
            return boost * d * v


@_njit
def _gibbs_chain(gen, n, xbar, xmin, xmax, x_bar_adj, a_star, b_star,
                 mu0, tau0_sq, alpha0, beta0, iters,
                 init_mu, init_sigma_sq, use_augmented_mean):
    """Five-step Gibbs loop.  Returns (mu draws, sigma^2 draws, err_iter);
    err_iter is -1 on success, else the iteration where the zero-mean
    truncation location could not be bracketed."""
    out_mu = np.empty(iters)
    out_ssq = np.empty(iters)
    n_int = n - 2
    z = np.empty(n_int)
    mu = init_mu
    ssq = init_sigma_sq
    gshape = alpha0 + 0.5 * n
    for t in range(iters):
        sigma = math.sqrt(ssq)
        # step 2: augment the interior values
        m_tr, ok = _solve_mu_trunc(sigma, a_star, b_star)
        if not ok:
            return out_mu, out_ssq, t
        alpha = (a_star - m_tr) / sigma
        beta = (b_star - m_tr) / sigma
        for j in range(n_int):
            z[j] = m_tr + sigma * _truncstd_sample(gen, alpha, beta)
        # step 3: mu | sigma^2, xbar (sigma^2 from the previous iteration)
        if use_augmented_mean:
            s = xmin + xmax
            for j in range(n_int):
                s += z[j] + x_bar_adj
            xb = s / n
        else:
            xb = xbar
        post_var = 1.0 / (1.0 / tau0_sq + n / ssq)
        post_mean = (mu0 / tau0_sq + n * xb / ssq) * post_var
        mu = post_mean + math.sqrt(post_var) * _std_normal(gen)
        # step 4: sigma^2 | mu, x*
        ss = (xmin - mu) ** 2 + (xmax - mu) ** 2
        for j in range(n_int):
            d = z[j] + x_bar_adj - mu
            ss += d * d
        ssq = (beta0 + 0.5 * ss) / _gamma_sample(gen, gshape)
        out_mu[t] = mu
        out_ssq[t] = ssq
    return out_mu, out_ssq, -1


@_njit
def _log_post_summary(n, xbar_adj, xmin, xmax, mu, lss,
                      mu0, tau0_sq, alpha0, beta0):
    # Log posterior of (mu, log sigma^2) under the order-statistic likelihood
    # with normal/inverse-gamma priors and the log-scale Jacobian.
    ssq = math.exp(lss)
    sigma = math.sqrt(ssq)
    # truncated-normal factor for the adjusted mean, variance sigma^2/(n-2)
    s_adj = sigma / math.sqrt(n - 2.0)
    za = (xmin - mu) / s_adj
    zb = (xmax - mu) / s_adj
    zx = (xbar_adj - mu) / s_adj
    lp = -0.5 * zx * zx - math.log(s_adj) - 0.5 * _LOG_2PI
    lp -= _log_mass(za, zb)
    # order-statistic densities of the minimum and maximum
    zmin = (xmin - mu) / sigma
    zmax = (xmax - mu) / sigma
    lp += math.log(n) + (n - 1.0) * _log_ndtr(-zmin) \
        - 0.5 * zmin * zmin - math.log(sigma) - 0.5 * _LOG_2PI
    lp += math.log(n) + (n - 1.0) * _log_ndtr(zmax) \
        - 0.5 * zmax * zmax - math.log(sigma) - 0.5 * _LOG_2PI
    # priors and Jacobian
    dm = mu - mu0
    lp += -0.5 * dm * dm / tau0_sq - 0.5 * math.log(_TWO_PI * tau0_sq)
    lp += alpha0 * math.log(beta0) - math.lgamma(alpha0) \
        - (alpha0 + 1.0) * lss - beta0 / ssq
    lp += lss
    return lp


@_njit
def _rw_chain(gen, n, xbar_adj, xmin, xmax, mu0, tau0_sq, alpha0, beta0,
              iters, mu, lss, step_mu, step_lss):
    """Random-walk Metropolis on (mu, log sigma^2).  Returns
    (mu draws, sigma^2 draws, final mu, final lss, accept count)."""
    out_mu = np.empty(iters)
    out_ssq = np.empty(iters)
    lp = _log_post_summary(n, xbar_adj, xmin, xmax, mu, lss,
                           mu0, tau0_sq, alpha0, beta0)
    acc = 0
    for t in range(iters):
        pm = mu + step_mu * _std_normal(gen)
        pl = lss + step_lss * _std_normal(gen)
        plp = _log_post_summary(n, xbar_adj, xmin, xmax, pm, pl,
                                mu0, tau0_sq, alpha0, beta0)
        d = plp - lp
        if d >= 0.0 or gen.random() < math.exp(d):
            mu = pm
            lss = pl
            lp = plp
            acc += 1
        out_mu[t] = mu
        out_ssq[t] = math.exp(lss)
    return out_mu, out_ssq, mu, lss, acc
