"""Monte-Carlo estimates of the expected statistic under a uniform null.

Every trial owns its random stream, derived from ``(seed, trial index)``
through :class:`numpy.random.SeedSequence`. Trials are evaluated in blocks
that may run on several workers; results are always reduced in trial order,
so output does not depend on the worker count.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from ._validation import check_seed
from .exceptions import DivergentStatisticError, DomainError
from .statistics import StatSpec, batch_evaluate

__all__ = ["McEstimate", "simulate_risk", "divergence_probe", "trial_statistics", "HeavyTailWarning"]

_BLOCK = 1024


class HeavyTailWarning(UserWarning):
    """Monte-Carlo means near a pole are heavy-tailed and unreliable."""


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    trials: int
    n: int
    spec: StatSpec
    seed: int
    max_value: float = math.nan
    warnings: tuple[str, ...] = field(default=())


def _trial_uniforms(seed: int, start: int, stop: int, n: int) -> np.ndarray:
    out = np.empty((stop - start, n))
    for row, trial in enumerate(range(start, stop)):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))
        out[row] = rng.random(n)
    out.sort(axis=1)
    return out


def _block_values(seed: int, start: int, stop: int, n: int, spec: StatSpec) -> np.ndarray:
    return batch_evaluate(_trial_uniforms(seed, start, stop, n), spec)


def trial_statistics(n: int, spec: StatSpec, trials: int, seed: int, n_jobs: int = 1) -> np.ndarray:
    """Statistic value of each trial, in trial order."""
    if not spec.evaluable:
        raise DivergentStatisticError("the stress-3 statistic diverges; refusing to simulate")
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    if int(trials) != trials or trials < 2:
        raise DomainError("trials must be an integer >= 2")
    seed = check_seed(seed)
    bounds = [(s, min(s + _BLOCK, trials)) for s in range(0, int(trials), _BLOCK)]
    if n_jobs == 1 or len(bounds) == 1:
        parts = [_block_values(seed, a, b, int(n), spec) for a, b in bounds]
    else:
        parts = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(_block_values)(seed, a, b, int(n), spec) for a, b in bounds
        )
    return np.concatenate(parts)


def _pole_warnings(spec: StatSpec) -> tuple[str, ...]:
    s = spec.stress
    notes = []
    if abs(s - 2.0) < 1e-9:
        notes.append("stress 2: each statistic is finite but its expectation diverges")
    elif 1.9 < s < 2.1 or 2.9 < s < 3.1:
        notes.append("stress near a pole: Monte-Carlo mean is heavy-tailed, acceptance bands unreliable")
    return tuple(notes)


def simulate_risk(n: int, spec: StatSpec, trials: int, seed: int, n_jobs: int = 1) -> McEstimate:
    """Sample mean and standard error of the statistic over uniform samples.

    Parameters
    ----------
    n : int
        Sample size of each trial.
    spec : StatSpec
        Statistic to evaluate (the model CDF is the identity).
    trials : int
        Number of independent samples, at least 2.
    seed : int
        Master seed; the result is bit-identical for equal inputs.
    n_jobs : int
        Worker threads; has no influence on the result.
    """
    if not spec.evaluable:
        raise DivergentStatisticError("the stress-3 statistic diverges; refusing to simulate")
    notes = _pole_warnings(spec)
    for note in notes:
        warnings.warn(note, HeavyTailWarning, stacklevel=2)
    values = trial_statistics(n, spec, trials, seed, n_jobs)
    return McEstimate(
        mean=float(values.mean()),
        std_error=float(values.std(ddof=1) / math.sqrt(values.size)),
        trials=int(values.size),
        n=int(n),
        spec=spec,
        seed=int(seed),
        max_value=float(values.max()),
        warnings=notes,
    )


def divergence_probe(a: float, n: int, trial_schedule, seed: int, n_jobs: int = 1) -> list[McEstimate]:
    """Running means over nested trial sets for the stress-2 statistic.

    Trial ``j`` uses the same stream in every set, so the sets are nested and
    the observed maxima are non-decreasing along the schedule. Purely
    descriptive: no convergence is implied.
    """
    if abs(a - 2.0) >= 1e-9:
        raise DomainError("divergence_probe is defined for stress 2 only")
    schedule = [int(t) for t in trial_schedule]
    if not schedule or any(t < 2 for t in schedule) or any(b <= a_ for a_, b in zip(schedule, schedule[1:])):
        raise DomainError("trial_schedule must be increasing counts >= 2")
    spec = StatSpec("lower", 2.0)
    values = trial_statistics(n, spec, schedule[-1], seed, n_jobs)
    notes = _pole_warnings(spec)
    out = []
    for t in schedule:
        v = values[:t]
        out.append(
            McEstimate(
                mean=float(v.mean()),
                std_error=float(v.std(ddof=1) / math.sqrt(t)),
                trials=t,
                n=int(n),
                spec=spec,
                seed=int(seed),
                max_value=float(v.max()),
                warnings=notes,
            )
        )
    return out
