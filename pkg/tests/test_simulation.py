import csv
import math

import numpy as np
import pytest

from normrange.core import SamplerConfig, SummaryStats, validate
from normrange.distributions import make_rng
from normrange.exceptions import DomainError, NumericalError
from normrange.simulation import (
    AGGREGATE_COLUMNS,
    TIDY_COLUMNS,
    ReplicateResult,
    Scenario,
    aggregate,
    compare_methods,
    coverage,
    emit_report,
    generate_dataset,
    rmse,
    run_cell,
    run_replicates,
    summarize_dataset,
)

SMALL = Scenario(sizes=(10,), replicates=2, methods=("gibbs",),
                 sampler=SamplerConfig(iterations=400, burn_in=200, seed=0),
                 base_seed=7)


class TestGenerate:
    def test_order_invariant(self):
        gen = make_rng(1)
        stats = summarize_dataset(generate_dataset(gen, 50, 1.0, 2.0))
        assert stats.min <= stats.mean <= stats.max

    def test_clt_oracle(self):
        gen = make_rng(2)
        data = generate_dataset(gen, 1_000_000, 3.0, 2.0)
        assert abs(data.mean() - 3.0) < 3 * 2.0 / math.sqrt(data.size)

    def test_seed_reproducibility(self):
        a = generate_dataset(make_rng(3), 100, 0.0, 5.0)
        b = generate_dataset(make_rng(3), 100, 0.0, 5.0)
        np.testing.assert_array_equal(a, b)

    def test_parameter_validation(self):
        with pytest.raises(DomainError):
            generate_dataset(make_rng(0), 2, 0.0, 1.0)
        with pytest.raises(DomainError):
            generate_dataset(make_rng(0), 10, 0.0, -1.0)


class TestSummarizeDataset:
    def test_arithmetic(self):
        stats = summarize_dataset([1.0, 2.0, 6.0])
        assert stats == SummaryStats(3, 3.0, 1.0, 6.0)

    def test_permutation_invariance(self):
        assert summarize_dataset([6.0, 1.0, 2.0]) == summarize_dataset([1.0, 2.0, 6.0])

    def test_constant_vector_rejected_downstream(self):
        stats = summarize_dataset([2.0, 2.0, 2.0])
        assert validate(stats) != []

    def test_too_short(self):
        with pytest.raises(DomainError):
            summarize_dataset([1.0, 2.0])


class TestRmseCoverage:
    def test_rmse_zero_iff_exact(self):
        assert rmse([3.0, 3.0], 3.0) == 0.0
        assert rmse([4.0, 2.0], 3.0) == 1.0
        assert rmse([3.3], 3.0) == pytest.approx(0.3)
        assert rmse(np.random.default_rng(0).normal(size=50), 0.0) > 0.0

    def test_rmse_empty(self):
        with pytest.raises(ValueError):
            rmse([], 0.0)

    def test_coverage(self):
        assert coverage([(-1, 1), (-2, 0.5)], 0.0) == 1.0
        assert coverage([(1, 2), (3, 4)], 0.0) == 0.0
        assert coverage([(-1, 1)] * 10 + [(1, 2)] * 10, 0.0) == 0.5

    def test_coverage_empty(self):
        with pytest.raises(ValueError):
            coverage([], 0.0)


class TestRunReplicates:
    def test_single_cell_count(self):
        results = run_replicates(Scenario(sizes=(10,), replicates=1,
                                          methods=("gibbs",),
                                          sampler=SMALL.sampler, base_seed=7))
        assert len(results) == 1
        assert results[0].ok

    def test_determinism(self):
        def key(results):
            # wall_time_ms is the only nondeterministic field
            return [(r.size, r.replicate, r.method, r.seed, r.status, r.summary)
                    for r in results]

        assert key(run_replicates(SMALL)) == key(run_replicates(SMALL))

    def test_cell_reproducible_in_isolation(self):
        results = run_replicates(SMALL)
        redo = run_cell(SMALL, 10, 1, "gibbs")
        match = [r for r in results if r.replicate == 1][0]
        assert redo.seed == match.seed
        assert redo.summary == match.summary

    def test_methods_share_datasets(self):
        # identical dataset seeds across methods: posterior means close
        sc = Scenario(sizes=(100,), replicates=1,
                      sampler=SamplerConfig(iterations=4000, burn_in=1000, seed=0),
                      base_seed=11)
        rg = run_cell(sc, 100, 0, "gibbs")
        rm = run_cell(sc, 100, 0, "metropolis")
        assert abs(rg.summary.mu.post_mean - rm.summary.mu.post_mean) < 1.0

    def test_worker_pool_matches_serial(self):
        serial = run_replicates(SMALL, workers=1)
        parallel = run_replicates(SMALL, workers=2)
        assert [(r.size, r.replicate, r.method, r.seed, r.status, r.summary)
                for r in serial] == \
               [(r.size, r.replicate, r.method, r.seed, r.status, r.summary)
                for r in parallel]

    def test_failures_recorded_not_raised(self, monkeypatch):
        import normrange.simulation as sim

        def boom(*a, **k):
            raise NumericalError("injected failure")

        monkeypatch.setattr(sim, "run_gibbs", boom)
        results = run_replicates(SMALL)
        assert all(r.status.startswith("failed:") for r in results)
        agg = aggregate(results, SMALL)
        assert all(row["n_failed"] == 2 and row["n_ok"] == 0 for row in agg)
        assert all(math.isnan(row["rmse"]) for row in agg)


def _fake_summary(mu_mean, sigma_mean):
    from normrange.core import ParamSummary, PosteriorSummary

    def ps(m):
        return ParamSummary(post_mean=m, post_sd=0.1, ci_lower=m - 0.2,
                            ci_upper=m + 0.2, ess=500.0, rhat=1.0)

    return PosteriorSummary(mu=ps(mu_mean), sigma=ps(sigma_mean), n_retained=500)


def _fake_results(scenario, mu_of=lambda size, method: 0.1,
                  sigma_of=lambda size, method: 5.1):
    out = []
    for size in scenario.sizes:
        for rep in range(scenario.replicates):
            for method in scenario.methods:
                out.append(ReplicateResult(
                    size=size, replicate=rep, method=method, seed=1,
                    wall_time_ms=1.0, status="ok",
                    summary=_fake_summary(mu_of(size, method),
                                          sigma_of(size, method))))
    return out


class TestAggregateCompare:
    SC = Scenario(sizes=(10, 50), replicates=3, base_seed=1)

    def test_aggregate_row_count(self):
        rows = aggregate(_fake_results(self.SC), self.SC)
        assert len(rows) == 2 * 2 * 2  # sizes x methods x params

    def test_identical_methods_give_zero_rel_diff(self):
        rows = aggregate(_fake_results(self.SC), self.SC)
        comp = compare_methods(rows)
        assert len(comp) == 4  # sizes x params
        assert all(c["rel_diff"] == 0.0 and not c["flagged"] for c in comp)

    def test_disagreement_flagged(self):
        results = _fake_results(
            self.SC, mu_of=lambda s, m: 0.1 if m == "gibbs" else 2.0)
        comp = compare_methods(aggregate(results, self.SC))
        assert any(c["flagged"] for c in comp if c["param"] == "mu")


class TestEmitReport:
    SC = Scenario(sizes=(10, 50), replicates=3, base_seed=1)

    def test_tidy_and_aggregate_files(self, tmp_path):
        results = _fake_results(self.SC)
        written = emit_report(results, self.SC, str(tmp_path))
        with open(written[0]) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == TIDY_COLUMNS
        # one row per (replicate, parameter)
        assert len(rows) - 1 == 2 * 3 * 2 * 2
        with open(written[1]) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == AGGREGATE_COLUMNS
        assert len(rows) - 1 == 2 * 2 * 2

    def test_reemission_byte_identical(self, tmp_path):
        results = _fake_results(self.SC)
        a = emit_report(results, self.SC, str(tmp_path / "a"))
        b = emit_report(results, self.SC, str(tmp_path / "b"))
        for pa, pb in zip(a, b):
            assert open(pa, "rb").read() == open(pb, "rb").read()

    def test_empty_results_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_report([], self.SC, str(tmp_path))
