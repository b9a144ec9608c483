import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from tailstat.edf import (
    ExponentialCdf,
    GpdCdf,
    NormalCdf,
    OrderedUnitSample,
    PitCdf,
    Sample,
    UniformCdf,
    edf_value,
    to_ordered_unit,
)
from tailstat.exceptions import DomainError

finite = st.floats(-1e6, 1e6, allow_nan=False)


def test_edf_count():
    assert edf_value([1, 2, 3], 2) == pytest.approx(2 / 3)
    assert edf_value([1, 2, 3], 0.5) == 0
    assert edf_value([1, 2, 3], 3) == 1
    assert edf_value([1, 2, 3], 10) == 1


def test_edf_keeps_ties():
    assert edf_value([1, 1, 2, 5], 1) == 0.5


@given(st.lists(finite, min_size=1, max_size=30), st.lists(finite, min_size=2, max_size=10))
def test_edf_monotone_steps(values, xs):
    n = len(values)
    ys = [edf_value(values, x) for x in sorted(xs)]
    assert all(a <= b for a, b in zip(ys, ys[1:]))
    for y in ys:
        assert abs(y * n - round(y * n)) < 1e-9


def test_sample_rejects_non_finite():
    with pytest.raises(DomainError):
        Sample([1.0, math.nan])
    with pytest.raises(DomainError):
        Sample([])


def test_uniform_transform():
    u = to_ordered_unit([3, 1, 2], UniformCdf(0, 4))
    np.testing.assert_allclose(u.u, [0.25, 0.5, 0.75])


def test_exponential_median():
    assert float(ExponentialCdf(1.0).cdf(math.log(2))) == pytest.approx(0.5, rel=1e-15)


@given(st.lists(finite, min_size=1, max_size=40), st.randoms())
def test_permutation_invariance(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    cdf = NormalCdf(0.0, 1e3)
    assert np.array_equal(to_ordered_unit(values, cdf).u, to_ordered_unit(shuffled, cdf).u)


def test_pit_marginals_uniform():
    rng = np.random.default_rng(2024)
    n = 5
    draws = rng.exponential(2.0, size=(10_000, n))
    cdf = ExponentialCdf(0.5)
    units = np.array([to_ordered_unit(row, cdf).u for row in draws])
    # each order statistic is Beta(i, n-i+1)
    for i in range(n):
        assert stats.kstest(units[:, i], stats.beta(i + 1, n - i).cdf).pvalue > 0.01
    # unsorted PIT values are uniform
    assert stats.kstest(cdf.cdf(draws[:, 0]), "uniform").pvalue > 0.01


def test_gpd_model_below_threshold_is_domain_error():
    with pytest.raises(DomainError):
        to_ordered_unit([0.5, 2.0], GpdCdf(0.2, 1.0, threshold=1.0))


def test_pit_range_checked():
    with pytest.raises(DomainError):
        to_ordered_unit([0.2, 1.5], PitCdf())


def test_ordered_unit_validation():
    with pytest.raises(DomainError):
        OrderedUnitSample([0.5, 0.2])
    with pytest.raises(DomainError):
        OrderedUnitSample([-0.1, 0.2])


def test_guard_counts_zeros():
    u = OrderedUnitSample([0.0, 0.0, 0.3])
    vals, count = u.guarded()
    assert count == 2
    assert vals[0] == 1e-300 and vals[2] == 0.3


def test_reflection():
    u = OrderedUnitSample([0.2, 0.9])
    np.testing.assert_allclose(u.reflect().u, [0.1, 0.8])
