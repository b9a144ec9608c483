import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tailstat.exceptions import DivergentStatisticError, DomainError, InsufficientDataError
from tailstat.gpd import GpdParams, gpd_fit_mle, gpd_sample, gpd_sf_array
from tailstat.statistics import StatSpec, ad_stat, lower_tail_stat
from tailstat.edf import OrderedUnitSample
from tailstat.threshold import (
    DivergentRiskWarning,
    _pvalue,
    bootstrap_statistics,
    excess_statistic,
    forward_stop,
    select_threshold,
    tail_gof_pvalue,
)

from _synthetic import SPLICE_GRID, splice_sample


def gpd_data(seed, m=300, xi=0.2, sigma=1.0):
    return gpd_sample(GpdParams(xi, sigma), m, np.random.default_rng(seed))


class TestForwardStop:
    def test_no_rejection(self):
        assert forward_stop([0.5, 0.6, 0.7], 0.1) == 0

    def test_all_rejected(self):
        assert forward_stop([0.001, 0.002, 0.01], 0.1) == 3

    def test_partial(self):
        # running means of -log(1-p): 0.001, ~0.0005 + 0.35, ...
        assert forward_stop([0.001, 0.001, 0.5, 0.9], 0.1) == 2

    def test_p_equal_one(self):
        assert forward_stop([0.01, 1.0], 0.1) == 1

    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=30), st.floats(0.01, 0.5))
    def test_range_and_definition(self, p, alpha):
        k = forward_stop(p, alpha)
        assert 0 <= k <= len(p)
        if k:
            with np.errstate(divide="ignore"):
                y = -np.log1p(-np.asarray(p))
            assert y[:k].mean() <= alpha + 1e-12


class TestPvalue:
    def test_all_boot_below(self):
        assert _pvalue(5.0, np.linspace(0.0, 1.0, 99)) == pytest.approx(1 / 100)

    def test_all_boot_above(self):
        assert _pvalue(0.0, np.linspace(1.0, 2.0, 99)) == 1.0

    def test_ties_count(self):
        assert _pvalue(1.0, np.ones(99)) == 1.0

    def test_large_observation_gives_floor(self):
        # a tail far heavier than the fitted model drives the statistic beyond every replicate
        y = gpd_data(0, m=200)
        obs, p = tail_gof_pvalue(y, GpdParams(-0.9, 0.05), bootstrap_reps=99, seed=1)
        assert p == pytest.approx(1 / 100)

    def test_reps_minimum(self):
        y = gpd_data(1)
        with pytest.raises(DomainError):
            tail_gof_pvalue(y, gpd_fit_mle(y).params, bootstrap_reps=50)

    def test_stress_three_refused(self):
        y = gpd_data(1)
        with pytest.raises(DivergentStatisticError):
            tail_gof_pvalue(y, gpd_fit_mle(y).params, StatSpec("lower", 3.0))

    def test_worker_invariant(self):
        y = gpd_data(2)
        p = gpd_fit_mle(y).params
        spec = StatSpec("upper", 1.0)
        a = bootstrap_statistics(p, y.size, spec, 200, seed=3)
        b = bootstrap_statistics(p, y.size, spec, 200, seed=3, n_jobs=3)
        assert np.array_equal(a, b)

    def test_p_in_unit_interval(self):
        y = gpd_data(4)
        _, p = tail_gof_pvalue(y, gpd_fit_mle(y).params, bootstrap_reps=99, seed=0)
        assert 0.0 < p <= 1.0


class TestExcessStatistic:
    def test_upper_uses_survival(self):
        y = gpd_data(5, m=50)
        params = GpdParams(0.2, 1.0)
        value, clamped = excess_statistic(y, params, StatSpec("upper", 1.0))
        reflected = np.sort(gpd_sf_array(y, 0.2, 1.0))
        assert value == pytest.approx(lower_tail_stat(reflected, 1.0).value, rel=1e-12)
        assert clamped == 0

    def test_both_is_anderson_darling(self):
        y = gpd_data(6, m=50)
        value, _ = excess_statistic(y, GpdParams(0.2, 1.0), StatSpec("both", 1.0))
        u = OrderedUnitSample.from_values(1.0 - gpd_sf_array(y, 0.2, 1.0))
        assert value == pytest.approx(ad_stat(u).value, rel=1e-9)


class TestSelect:
    def test_reproducible(self):
        x = splice_sample(3, n=1500)
        grid = np.arange(0.0, 2.51, 0.5)
        a = select_threshold(x, grid, bootstrap_reps=99, seed=7)
        b = select_threshold(x, grid, bootstrap_reps=99, seed=7)
        c = select_threshold(x, grid, bootstrap_reps=99, seed=7, n_jobs=2)
        assert a == b == c

    def test_scan_invariants(self):
        x = splice_sample(4, n=1500)
        scan = select_threshold(x, np.arange(0.0, 3.01, 0.5), bootstrap_reps=99, seed=1)
        counts = np.array(scan.excess_counts)
        assert np.all(np.diff(counts) < 0)
        assert all(0.0 < p <= 1.0 for p in scan.p_values)
        assert list(scan.candidates) == sorted(scan.candidates)
        assert scan.risk.value == 0.5
        assert len(scan.params) == len(scan.candidates) == len(scan.statistics)

    def test_skips_sparse_candidates(self):
        x = gpd_data(8, m=400)
        high = float(np.sort(x)[-10])
        scan = select_threshold(x, [0.0, 0.5, high], bootstrap_reps=99, seed=0)
        assert scan.skipped == (high,)
        assert len(scan.candidates) == 2

    def test_no_usable_candidate(self):
        x = gpd_data(9, m=200)
        with pytest.raises(InsufficientDataError):
            select_threshold(x, [x.max() + 1, x.max() + 2], bootstrap_reps=99)

    def test_candidate_validation(self):
        x = gpd_data(9, m=200)
        with pytest.raises(DomainError):
            select_threshold(x, [0.0], bootstrap_reps=99)
        with pytest.raises(DomainError):
            select_threshold(x, [0.5, 0.1], bootstrap_reps=99)
        with pytest.raises(DomainError):
            select_threshold(x, [0.0, 0.1], alpha=1.0, bootstrap_reps=99)

    def test_divergent_risk_warns_and_proceeds(self):
        x = gpd_data(10, m=300)
        with pytest.warns(DivergentRiskWarning):
            scan = select_threshold(x, [0.0, 0.2], StatSpec("upper", 2.0), bootstrap_reps=99)
        assert scan.risk.kind == "divergent"
        assert scan.warnings

    def test_ad_reports_doubled_risk(self):
        x = gpd_data(11, m=300)
        scan = select_threshold(x, [0.0, 0.2], StatSpec("both", 1.0), bootstrap_reps=99)
        assert scan.risk.value == 1

    def test_rejects_all_gives_none(self):
        # lognormal data is not GPD above low thresholds at this sample size
        x = np.random.default_rng(0).lognormal(size=3000)
        scan = select_threshold(x, [0.0, 0.05], bootstrap_reps=99, seed=0)
        assert scan.selected_index is None
        assert scan.selected_threshold is None
        assert scan.diagnostic

    def test_first_pass_rule(self):
        x = splice_sample(5, n=2000)
        grid = np.arange(0.0, 3.01, 0.5)
        scan = select_threshold(x, grid, bootstrap_reps=99, seed=2, stopping="first-pass")
        idx = scan.selected_index
        assert idx is not None
        assert all(p <= 0.1 for p in scan.p_values[:idx])
        assert scan.p_values[idx] > 0.1


@pytest.mark.slow
def test_power_against_lognormal():
    ps = []
    for seed in range(50):
        y = np.random.default_rng([13, seed]).lognormal(size=2000)
        fit = gpd_fit_mle(y)
        ps.append(tail_gof_pvalue(y, fit.params, StatSpec("upper", 1.0), 99, seed=seed)[1])
    assert np.median(ps) < 0.05


@pytest.mark.slow
def test_null_selects_smallest_candidate():
    grid = np.arange(0.0, 2.01, 0.25)
    picks = []
    for seed in range(30):
        x = gpd_sample(GpdParams(0.2, 1.0), 2000, np.random.default_rng([11, seed]))
        picks.append(select_threshold(x, grid, seed=seed).selected_index)
    assert sum(p == 0 for p in picks) >= 0.9 * len(picks)
