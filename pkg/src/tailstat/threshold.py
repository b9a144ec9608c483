"""Automated peaks-over-threshold threshold selection.

For every candidate threshold (ascending) a GPD is fitted to the excesses,
the excesses are mapped through the fitted distribution and a tail statistic
is computed on the result. A parametric bootstrap turns each statistic into a
p-value and an ordered-hypothesis stopping rule picks the lowest threshold
whose tail model is not rejected.

The default statistic is the stress-1 member weighting the high quantiles of
the excess distribution. All procedural choices here (bootstrap calibration,
ForwardStop) are this package's own construction around that statistic.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_sample, check_seed
from .exceptions import DomainError, InsufficientDataError
from .gpd import (
    GpdParams,
    fit_profile_batch,
    gpd_cdf_array,
    gpd_fit_mle,
    gpd_sample,
    gpd_sf_array,
)
from .risk import RiskValue, risk_lower
from .statistics import StatSpec, lower_tail_batch

__all__ = [
    "ThresholdScan",
    "excess_statistic",
    "tail_gof_pvalue",
    "forward_stop",
    "select_threshold",
    "ThresholdSelector",
    "DivergentRiskWarning",
]

Stopping = Literal["forwardstop", "first-pass"]

_BOOT_CHUNK = 64


class DivergentRiskWarning(UserWarning):
    """The chosen statistic has infinite expected loss."""


@dataclass(frozen=True)
class ThresholdScan:
    candidates: tuple[float, ...]
    excess_counts: tuple[int, ...]
    params: tuple[GpdParams, ...]
    converged: tuple[bool, ...]
    statistics: tuple[float, ...]
    p_values: tuple[float, ...]
    selected_index: Optional[int]
    spec: StatSpec
    alpha: float
    stopping: str
    bootstrap_reps: int
    seed: int
    risk: RiskValue
    skipped: tuple[float, ...] = ()
    clamped: tuple[int, ...] = ()
    diagnostic: str = ""
    warnings: tuple[str, ...] = field(default=())

    @property
    def selected_threshold(self) -> Optional[float]:
        if self.selected_index is None:
            return None
        return self.candidates[self.selected_index]


def _unit_rows(Y: np.ndarray, xi, sigma, side: str) -> np.ndarray:
    """Sorted PIT rows; for ``upper`` the survival values, i.e. the reflection."""
    fn = gpd_sf_array if side == "upper" else gpd_cdf_array
    Z = np.empty_like(Y)
    for r in range(Y.shape[0]):
        Z[r] = fn(Y[r], float(xi[r]), float(sigma[r]))
    Z.sort(axis=1)
    return Z


def _batch_statistic(Y: np.ndarray, xi, sigma, spec: StatSpec) -> np.ndarray:
    if spec.side == "both":
        lo = lower_tail_batch(_unit_rows(Y, xi, sigma, "lower"), 1.0)
        return lo + lower_tail_batch(_unit_rows(Y, xi, sigma, "upper"), 1.0)
    return lower_tail_batch(_unit_rows(Y, xi, sigma, spec.side), spec.stress)


def excess_statistic(excesses, params: GpdParams, spec: StatSpec) -> tuple[float, int]:
    """Statistic of excesses under a fitted GPD, plus the count of exact zeros
    in the unit sample that had to be guarded.

    ``spec.side == "upper"`` weights the high quantiles. The reflected unit
    sample is formed from survival probabilities directly, so precision is
    kept far out in the tail.
    """
    y = check_sample(excesses, name="excesses")
    Y = y[None, :]
    sides = ["lower", "upper"] if spec.side == "both" else [spec.side]
    clamped = 0
    for side in sides:
        clamped += int((_unit_rows(Y, [params.xi], [params.sigma], side) == 0.0).sum())
    value = _batch_statistic(Y, [params.xi], [params.sigma], spec)[0]
    return float(value), clamped


def _boot_chunk(params: GpdParams, m: int, spec: StatSpec, seed: int, stream: int, reps) -> np.ndarray:
    Y = np.empty((len(reps), m))
    for row, r in enumerate(reps):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, r)))
        Y[row] = gpd_sample(GpdParams(params.xi, params.sigma, 0.0), m, rng)
    xi, sigma, _, _ = fit_profile_batch(Y)
    with np.errstate(all="ignore"):
        out = _batch_statistic(Y, xi, sigma, spec)
    return np.where(np.isfinite(out), out, np.inf)


def bootstrap_statistics(
    params: GpdParams, m: int, spec: StatSpec, reps: int, seed: int, stream: int = 0, n_jobs: int = 1
) -> np.ndarray:
    """Statistic of ``reps`` samples of size ``m`` drawn from and refitted to the GPD."""
    chunks = [range(s, min(s + _BOOT_CHUNK, reps)) for s in range(0, reps, _BOOT_CHUNK)]
    if n_jobs == 1 or len(chunks) == 1:
        parts = [_boot_chunk(params, m, spec, seed, stream, c) for c in chunks]
    else:
        parts = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(_boot_chunk)(params, m, spec, seed, stream, c) for c in chunks
        )
    return np.concatenate(parts)


def _check_spec(spec: StatSpec) -> None:
    if not spec.evaluable:
        from .exceptions import DivergentStatisticError

        raise DivergentStatisticError("the stress-3 statistic diverges")


def tail_gof_pvalue(
    excesses,
    fitted: GpdParams,
    spec: StatSpec = StatSpec("upper", 1.0),
    bootstrap_reps: int = 99,
    seed: int = 0,
    *,
    stream: int = 0,
    n_jobs: int = 1,
) -> tuple[float, float]:
    """Observed statistic and parametric-bootstrap p-value.

    Each replicate draws ``len(excesses)`` values from ``fitted``, refits the
    GPD and recomputes the statistic;
    ``p = (1 + #{boot >= observed}) / (reps + 1)``.
    """
    _check_spec(spec)
    if int(bootstrap_reps) != bootstrap_reps or bootstrap_reps < 99:
        raise DomainError("bootstrap_reps must be an integer >= 99")
    seed = check_seed(seed)
    y = check_sample(excesses, name="excesses")
    observed, _ = excess_statistic(y, fitted, spec)
    boot = bootstrap_statistics(fitted, y.size, spec, int(bootstrap_reps), seed, stream, n_jobs)
    return observed, _pvalue(observed, boot)


def _pvalue(observed: float, boot: np.ndarray) -> float:
    return (1 + int(np.count_nonzero(boot >= observed))) / (boot.size + 1)


def forward_stop(p_values, alpha: float) -> int:
    """Number of leading hypotheses rejected by ForwardStop.

    ``max{k : (1/k) Σ_{i<=k} -ln(1 - p_i) <= alpha}``, or 0 if no such ``k``.
    """
    p = np.asarray(p_values, dtype=np.float64)
    with np.errstate(divide="ignore"):
        y = -np.log1p(-p)
    running = np.cumsum(y) / np.arange(1, p.size + 1)
    hits = np.nonzero(running <= alpha)[0]
    return int(hits[-1] + 1) if hits.size else 0


def _first_pass(p_values, alpha: float) -> int:
    for i, p in enumerate(p_values):
        if p > alpha:
            return i
    return len(p_values)


def select_threshold(
    sample,
    candidates,
    spec: StatSpec = StatSpec("upper", 1.0),
    alpha: float = 0.1,
    bootstrap_reps: int = 99,
    seed: int = 0,
    *,
    min_excesses: int = 30,
    stopping: Stopping = "forwardstop",
    n_jobs: int = 1,
) -> ThresholdScan:
    """Scan ascending candidate thresholds and pick the first acceptable one.

    Candidates leaving fewer than ``min_excesses`` observations above them are
    skipped (they form a suffix since counts decrease). The stopping rule runs
    over the p-values of the remaining candidates in ascending order; the
    selected candidate is the first one not rejected.

    Raises
    ------
    InsufficientDataError
        If no candidate leaves enough excesses.
    """
    _check_spec(spec)
    x = check_sample(sample)
    cands = check_sample(candidates, name="candidates")
    if cands.size < 2:
        raise DomainError("need at least two candidate thresholds")
    if np.any(np.diff(cands) <= 0.0):
        raise DomainError("candidate thresholds must be strictly ascending")
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    if int(bootstrap_reps) != bootstrap_reps or bootstrap_reps < 99:
        raise DomainError("bootstrap_reps must be an integer >= 99")
    if stopping not in ("forwardstop", "first-pass"):
        raise DomainError(f"unknown stopping rule {stopping!r}")
    seed = check_seed(seed)

    notes = []
    risk = risk_lower(spec.stress)
    if not risk.finite:
        msg = f"stress {spec.stress:g} has divergent risk; the statistic should not be used"
        warnings.warn(msg, DivergentRiskWarning, stacklevel=2)
        notes.append(msg)
    elif spec.side == "both":
        risk = RiskValue("finite", 2 * risk.value)

    used, counts, fits, stats, pvals, clamps, skipped = [], [], [], [], [], [], []
    for idx, u in enumerate(cands.tolist()):
        excess = x[x > u] - u
        if excess.size < min_excesses or np.ptp(excess) == 0.0:
            skipped.append(u)
            continue
        fit = gpd_fit_mle(excess, min_excesses)
        params = GpdParams(fit.params.xi, fit.params.sigma, u)
        observed, clamped = excess_statistic(excess, fit.params, spec)
        boot = bootstrap_statistics(fit.params, excess.size, spec, int(bootstrap_reps), seed, idx, n_jobs)
        used.append(u)
        counts.append(int(excess.size))
        fits.append((params, fit.converged))
        stats.append(observed)
        pvals.append(_pvalue(observed, boot))
        clamps.append(clamped)
    if not used:
        raise InsufficientDataError(
            f"no candidate threshold leaves at least {min_excesses} distinct excesses"
        )

    if stopping == "forwardstop":
        rejected = forward_stop(pvals, alpha)
    else:
        rejected = _first_pass(pvals, alpha)
    selected = rejected if rejected < len(used) else None
    diagnostic = "" if selected is not None else "every evaluated candidate was rejected"
    return ThresholdScan(
        candidates=tuple(used),
        excess_counts=tuple(counts),
        params=tuple(p for p, _ in fits),
        converged=tuple(c for _, c in fits),
        statistics=tuple(stats),
        p_values=tuple(pvals),
        selected_index=selected,
        spec=spec,
        alpha=float(alpha),
        stopping=stopping,
        bootstrap_reps=int(bootstrap_reps),
        seed=seed,
        risk=risk,
        skipped=tuple(skipped),
        clamped=tuple(clamps),
        diagnostic=diagnostic,
        warnings=tuple(notes),
    )


class ThresholdSelector(BaseEstimator):
    """Estimator wrapper around :func:`select_threshold`.

    Parameters
    ----------
    candidates : array-like or None
        Ascending thresholds. ``None`` uses the empirical quantiles at levels
        0, 0.05, ..., 0.95 of the training sample.
    stress : float, default=1.0
    weight_side : {"high", "low", "both"}, default="high"
        Which end of the excess distribution the weight emphasizes;
        ``"both"`` is Anderson–Darling and requires ``stress == 1``.
    alpha : float, default=0.1
    bootstrap_reps : int, default=99
    min_excesses : int, default=30
    stopping : {"forwardstop", "first-pass"}, default="forwardstop"
    random_state : int, default=0
    n_jobs : int, default=1

    Attributes
    ----------
    scan_ : ThresholdScan
    threshold_ : float
        Selected threshold, NaN when every candidate was rejected.
    tail_params_ : GpdParams or None
    """

    def __init__(
        self,
        candidates=None,
        stress: float = 1.0,
        weight_side: str = "high",
        alpha: float = 0.1,
        bootstrap_reps: int = 99,
        min_excesses: int = 30,
        stopping: str = "forwardstop",
        random_state: int = 0,
        n_jobs: int = 1,
    ):
        self.candidates = candidates
        self.stress = stress
        self.weight_side = weight_side
        self.alpha = alpha
        self.bootstrap_reps = bootstrap_reps
        self.min_excesses = min_excesses
        self.stopping = stopping
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _spec(self) -> StatSpec:
        sides = {"high": "upper", "low": "lower", "both": "both"}
        if self.weight_side not in sides:
            raise DomainError(f"weight_side must be one of {sorted(sides)}")
        return StatSpec(sides[self.weight_side], self.stress)

    def fit(self, X, y=None):
        x = check_sample(X)
        cands = self.candidates
        if cands is None:
            cands = np.unique(np.quantile(x, np.linspace(0.0, 0.95, 20)))
        self.scan_ = select_threshold(
            x,
            cands,
            self._spec(),
            self.alpha,
            self.bootstrap_reps,
            self.random_state,
            min_excesses=self.min_excesses,
            stopping=self.stopping,
            n_jobs=self.n_jobs,
        )
        idx = self.scan_.selected_index
        self.threshold_ = math.nan if idx is None else self.scan_.candidates[idx]
        self.tail_params_ = None if idx is None else self.scan_.params[idx]
        return self

    def transform(self, X):
        """Tail-model CDF for observations at or above the selected threshold."""
        check_is_fitted(self, "scan_")
        x = check_sample(X)
        if self.tail_params_ is None:
            return np.full(x.shape, np.nan)
        p = self.tail_params_
        out = gpd_cdf_array(x - p.threshold, p.xi, p.sigma)
        return np.where(x >= p.threshold, out, np.nan)
