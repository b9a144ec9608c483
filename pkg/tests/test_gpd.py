import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from tailstat.exceptions import DomainError, InsufficientDataError
from tailstat.gpd import (
    GpdParams,
    fit_profile_batch,
    gpd_cdf,
    gpd_cdf_array,
    gpd_fit_mle,
    gpd_loglik,
    gpd_moment_start,
    gpd_sample,
    gpd_sf,
)


class TestCdf:
    def test_exponential_case(self):
        assert gpd_cdf(math.log(2), GpdParams(0.0, 1.0, 0.0)) == pytest.approx(0.5, rel=1e-15)

    def test_unit_shape(self):
        assert gpd_cdf(1.0, GpdParams(1.0, 1.0, 0.0)) == pytest.approx(0.5, rel=1e-15)

    @pytest.mark.parametrize("xi", [-0.5, 0.0, 0.3, 2.0])
    def test_zero_at_threshold(self, xi):
        assert gpd_cdf(1.5, GpdParams(xi, 0.7, 1.5)) == 0.0
        assert gpd_sf(1.5, GpdParams(xi, 0.7, 1.5)) == 1.0

    def test_below_threshold(self):
        with pytest.raises(DomainError):
            gpd_cdf(0.9, GpdParams(0.1, 1.0, 1.0))

    def test_tiny_shape_is_exponential(self):
        assert float(gpd_cdf_array(1.0, 1e-200, 1.0)) == pytest.approx(-math.expm1(-1.0), rel=1e-15)

    def test_bounded_support(self):
        p = GpdParams(-0.5, 1.0, 0.0)
        assert p.upper_endpoint == pytest.approx(2.0)
        assert gpd_cdf(2.0, p) == 1.0
        assert gpd_cdf(5.0, p) == 1.0

    def test_scale_positive(self):
        with pytest.raises(DomainError):
            GpdParams(0.1, 0.0)

    # scipy loses the exponential limit for |xi| far below machine epsilon
    @given(
        st.floats(-0.9, 3.0).filter(lambda v: v == 0.0 or abs(v) > 1e-6),
        st.floats(0.1, 10.0),
        st.floats(0.0, 50.0),
    )
    def test_matches_scipy(self, xi, sigma, y):
        ours = float(gpd_cdf_array(y, xi, sigma))
        ref = stats.genpareto.cdf(y, xi, scale=sigma)
        assert ours == pytest.approx(ref, rel=1e-9, abs=1e-14)

    @given(st.floats(-0.9, 3.0), st.floats(0.1, 10.0), st.floats(0.0, 50.0))
    def test_cdf_plus_sf(self, xi, sigma, x):
        p = GpdParams(xi, sigma)
        assert gpd_cdf(x, p) + gpd_sf(x, p) == pytest.approx(1.0, abs=1e-12)


class TestSampling:
    def test_threshold_shift(self):
        rng = np.random.default_rng(0)
        x = gpd_sample(GpdParams(0.2, 1.0, 3.0), 1000, rng)
        assert x.min() >= 3.0

    def test_distribution(self):
        rng = np.random.default_rng(1)
        x = gpd_sample(GpdParams(0.25, 2.0), 5000, rng)
        assert stats.kstest(x, stats.genpareto(0.25, scale=2.0).cdf).pvalue > 0.01


class TestLoglik:
    def test_matches_scipy(self):
        y = gpd_sample(GpdParams(0.3, 1.5), 200, np.random.default_rng(2))
        ref = stats.genpareto.logpdf(y, 0.3, scale=1.5).sum()
        assert gpd_loglik(y, 0.3, 1.5) == pytest.approx(ref, rel=1e-12)

    def test_outside_support(self):
        assert gpd_loglik([0.5, 3.0], -0.5, 1.0) == -math.inf


class TestFit:
    def test_recovers_heavy_tail(self):
        y = gpd_sample(GpdParams(0.25, 2.0), 10_000, np.random.default_rng(2024))
        fit = gpd_fit_mle(y)
        assert abs(fit.params.xi - 0.25) <= 0.05
        assert abs(fit.params.sigma - 2.0) <= 0.15
        assert fit.converged

    def test_recovers_exponential(self):
        y = np.random.default_rng(7).exponential(1.0, 10_000)
        fit = gpd_fit_mle(y)
        assert abs(fit.params.xi) <= 0.04

    def test_bounded_tail(self):
        y = gpd_sample(GpdParams(-0.3, 1.0), 5000, np.random.default_rng(3))
        fit = gpd_fit_mle(y)
        assert abs(fit.params.xi + 0.3) <= 0.06
        assert fit.params.upper_endpoint >= y.max()

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(-0.4, 1.0), st.integers(30, 400))
    def test_not_worse_than_moment_start(self, seed, xi, m):
        y = gpd_sample(GpdParams(xi, 1.0), m, np.random.default_rng(seed))
        fit = gpd_fit_mle(y)
        assert fit.loglik >= fit.start_loglik
        assert fit.loglik == pytest.approx(gpd_loglik(y, fit.params.xi, fit.params.sigma), rel=1e-9)

    def test_at_least_scipy(self):
        y = gpd_sample(GpdParams(0.4, 1.0), 500, np.random.default_rng(11))
        c, _, scale = stats.genpareto.fit(y, floc=0.0)
        assert gpd_fit_mle(y).loglik >= gpd_loglik(y, c, scale) - 1e-9

    def test_batch_matches_single(self):
        rng = np.random.default_rng(5)
        Y = np.stack([gpd_sample(GpdParams(0.2, 1.0), 100, rng) for _ in range(4)])
        xi, sigma, ll, _ = fit_profile_batch(Y)
        for r in range(4):
            fit = gpd_fit_mle(Y[r])
            assert xi[r] == pytest.approx(fit.params.xi, abs=1e-12)
            assert ll[r] == pytest.approx(fit.loglik, rel=1e-12)

    def test_constant_sample(self):
        with pytest.raises(InsufficientDataError):
            gpd_fit_mle(np.full(50, 1.3))

    def test_too_few(self):
        with pytest.raises(InsufficientDataError):
            gpd_fit_mle(np.arange(1.0, 10.0))

    def test_negative_excess(self):
        with pytest.raises(DomainError):
            gpd_fit_mle(np.linspace(-1.0, 3.0, 40))

    def test_moment_start_exponential(self):
        y = np.random.default_rng(0).exponential(2.0, 100_000)
        xi, sigma = gpd_moment_start(y)
        assert abs(xi) < 0.02 and abs(sigma - 2.0) < 0.05
