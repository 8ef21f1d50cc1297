import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normrange.core import (
    INFEASIBLE_ADJ_MEAN,
    MEAN_OUT_OF_RANGE,
    MIN_GE_MAX,
    N_TOO_SMALL,
    Chain,
    SamplerConfig,
    SummaryStats,
    ess_geyer,
    require_valid,
    split_rhat,
    summarize,
    validate,
)
from normrange.exceptions import ValidationError

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


class TestValidate:
    def test_feasible_symmetric(self):
        assert validate(SummaryStats(10, 0.0, -2.0, 2.0)) == []

    def test_mean_above_max(self):
        assert MEAN_OUT_OF_RANGE in validate(SummaryStats(5, 10.0, 0.0, 4.0))

    def test_infeasible_adjusted_mean(self):
        # (4*3.4 - 0 - 4) / 2 = 4.8 > max: no 4-point sample exists
        codes = validate(SummaryStats(4, 3.4, 0.0, 4.0))
        assert codes == [INFEASIBLE_ADJ_MEAN]

    def test_n_too_small(self):
        assert N_TOO_SMALL in validate(SummaryStats(2, 0.5, 0.0, 1.0))
        assert N_TOO_SMALL in validate(SummaryStats(1, 0.5, 0.0, 1.0))

    def test_min_equals_max(self):
        assert MIN_GE_MAX in validate(SummaryStats(10, 1.0, 1.0, 1.0))

    def test_require_valid_raises_with_codes(self):
        with pytest.raises(ValidationError) as exc:
            require_valid(SummaryStats(2, 10.0, 0.0, 4.0))
        assert N_TOO_SMALL in exc.value.codes
        assert MEAN_OUT_OF_RANGE in exc.value.codes

    def test_rounding_slack(self):
        # adjusted mean a hair above max is absorbed, far above is not
        n, mn, mx = 10, -1.0, 1.0
        mean_edge = (mx * (n - 2) + mn + mx) / n  # adj exactly max
        assert validate(SummaryStats(n, mean_edge, mn, mx)) == []
        assert INFEASIBLE_ADJ_MEAN in validate(SummaryStats(n, mean_edge + 1e-3, mn, mx))

    @given(n=st.integers(-5, 2000), mean=finite, mn=finite, mx=finite)
    @settings(max_examples=300, deadline=None)
    def test_total_over_finite_inputs(self, n, mean, mn, mx):
        validate(SummaryStats(n, mean, mn, mx))

    @given(
        data=st.lists(st.floats(-1e6, 1e6), min_size=3, max_size=40),
    )
    @settings(max_examples=200, deadline=None)
    def test_real_samples_always_feasible(self, data):
        arr = np.asarray(data)
        if arr.min() == arr.max():
            return
        stats = SummaryStats(arr.size, float(arr.mean()), float(arr.min()),
                             float(arr.max()))
        assert validate(stats) == []


def _fake_chain(draws_mu, draws_ssq, iterations=None, burn_in=0, thin=1):
    iterations = iterations or len(draws_mu)
    cfg = SamplerConfig(iterations=iterations, burn_in=burn_in, seed=0, thin=thin)
    return Chain(mu=np.asarray(draws_mu, float),
                 sigma_sq=np.asarray(draws_ssq, float), config=cfg)


class TestSummarize:
    def test_constant_chain(self):
        chain = _fake_chain([2.0] * 500, [9.0] * 500)
        s = summarize(chain)
        assert s.mu.post_mean == 2.0
        assert s.mu.post_sd == 0.0
        assert (s.mu.ci_lower, s.mu.ci_upper) == (2.0, 2.0)
        assert s.sigma.post_mean == 3.0  # sigma scale, not sigma^2
        assert s.mu.rhat == 1.0

    def test_iid_chain_diagnostics(self):
        gen = np.random.default_rng(5)
        draws = gen.normal(size=20_000)
        chain = _fake_chain(draws, np.exp(gen.normal(size=20_000)))
        s = summarize(chain)
        assert 1.0 <= s.mu.rhat <= 1.02
        assert abs(s.mu.ess - draws.size) <= 0.2 * draws.size

    def test_antithetic_chain_ess_clamped(self):
        draws = np.tile([1.0, -1.0], 500)
        chain = _fake_chain(draws, np.ones_like(draws))
        s = summarize(chain)
        assert s.mu.ess <= draws.size

    def test_burn_in_and_thin_applied(self):
        mu = np.concatenate([np.full(100, -999.0), np.arange(400, dtype=float)])
        chain = _fake_chain(mu, np.ones_like(mu), burn_in=100, thin=2)
        s = summarize(chain)
        assert s.n_retained == 200
        assert -999.0 not in chain.retained()[0]

    def test_too_few_retained(self):
        chain = _fake_chain(np.arange(120.0), np.ones(120), burn_in=50)
        with pytest.raises(ValueError, match="retained"):
            summarize(chain)

    def test_moments_permutation_invariant(self):
        gen = np.random.default_rng(8)
        draws = gen.normal(size=2000)
        perm = gen.permutation(draws)
        a = summarize(_fake_chain(draws, np.exp(draws)))
        b = summarize(_fake_chain(perm, np.exp(perm)))
        assert a.mu.post_mean == pytest.approx(b.mu.post_mean, rel=1e-12)
        assert a.mu.post_sd == pytest.approx(b.mu.post_sd, rel=1e-12)
        assert a.mu.ci_lower == pytest.approx(b.mu.ci_lower, rel=1e-12)


class TestDiagnostics:
    def test_ess_positive_and_bounded(self):
        gen = np.random.default_rng(1)
        x = np.cumsum(gen.normal(size=5000)) * 0.05 + gen.normal(size=5000)
        ess = ess_geyer(x)
        assert 0 < ess <= x.size

    def test_split_rhat_detects_drift(self):
        x = np.concatenate([np.random.default_rng(2).normal(0, 1, 1000),
                            np.random.default_rng(3).normal(5, 1, 1000)])
        assert split_rhat(x) > 1.5
