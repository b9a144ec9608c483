import math
import warnings

import numpy as np
import pytest

from tailstat.exceptions import DivergentStatisticError, DomainError
from tailstat.montecarlo import HeavyTailWarning, divergence_probe, simulate_risk, trial_statistics
from tailstat.statistics import StatSpec, lower_tail_stat


def test_deterministic_and_worker_invariant():
    spec = StatSpec("lower", 0.5)
    a = simulate_risk(30, spec, 3000, seed=42)
    b = simulate_risk(30, spec, 3000, seed=42)
    c = simulate_risk(30, spec, 3000, seed=42, n_jobs=3)
    assert a == b == c


def test_trial_prefix_stable():
    spec = StatSpec("lower", 1.0)
    short = trial_statistics(20, spec, 1500, seed=5)
    long = trial_statistics(20, spec, 4000, seed=5, n_jobs=2)
    assert np.array_equal(short, long[:1500])


def test_different_seed_differs():
    spec = StatSpec("lower", 0.0)
    assert simulate_risk(10, spec, 100, seed=1).mean != simulate_risk(10, spec, 100, seed=2).mean


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0])
def test_mean_matches_risk(a):
    est = simulate_risk(50, StatSpec("lower", a), 5000, seed=123)
    expected = 1.0 / ((2 - a) * (3 - a))
    assert abs(est.mean - expected) <= 3 * est.std_error
    assert est.std_error >= 0 and est.trials == 5000


def test_upper_side_same_risk():
    est = simulate_risk(50, StatSpec("upper", 1.0), 5000, seed=3)
    assert abs(est.mean - 0.5) <= 3 * est.std_error


def test_std_error_scaling():
    spec = StatSpec("lower", 0.0)
    small = simulate_risk(100, spec, 1000, seed=9)
    big = simulate_risk(100, spec, 100_000, seed=9)
    assert 8 <= small.std_error / big.std_error <= 12


def test_stress_three_refused():
    with pytest.raises(DivergentStatisticError):
        simulate_risk(10, StatSpec("lower", 3.0), 100, seed=0)


def test_stress_two_warns():
    with pytest.warns(HeavyTailWarning, match="diverges"):
        est = simulate_risk(10, StatSpec("lower", 2.0), 200, seed=0)
    assert est.warnings and math.isfinite(est.mean)


def test_near_pole_warns():
    with pytest.warns(HeavyTailWarning):
        simulate_risk(10, StatSpec("lower", 1.95), 200, seed=0)


def test_no_warning_far_from_poles():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        simulate_risk(10, StatSpec("lower", 1.0), 200, seed=0)


@pytest.mark.parametrize("kwargs", [dict(trials=1), dict(n=0), dict(seed=-1)])
def test_argument_checks(kwargs):
    args = dict(n=5, spec=StatSpec("lower", 0.0), trials=10, seed=0)
    args.update(kwargs)
    with pytest.raises(DomainError):
        simulate_risk(**args)


class TestDivergenceProbe:
    def test_nested_maxima(self):
        out = divergence_probe(2.0, 10, [1000, 10_000, 100_000], seed=4)
        maxima = [e.max_value for e in out]
        assert maxima == sorted(maxima)
        assert [e.trials for e in out] == [1000, 10_000, 100_000]

    def test_deterministic(self):
        assert divergence_probe(2.0, 5, [100, 1000], seed=8) == divergence_probe(2.0, 5, [100, 1000], seed=8)

    def test_single_point_blowup(self):
        assert lower_tail_stat([1e-9], 2.0).value > 1e8

    def test_only_stress_two(self):
        with pytest.raises(DomainError):
            divergence_probe(1.0, 10, [100], seed=0)

    def test_schedule_increasing(self):
        with pytest.raises(DomainError):
            divergence_probe(2.0, 10, [100, 100], seed=0)
