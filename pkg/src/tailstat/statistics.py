"""Tail-weighted Cramér–von Mises family of goodness-of-fit statistics.

The lower-tail member with stress ``a`` is

    n * ∫ (F_n(t) - t)^2 / t^a dt   over [0, 1]

evaluated on an :class:`~tailstat.edf.OrderedUnitSample`. ``a = 0`` is the
Cramér–von Mises statistic, ``a = 1`` the Ahmad tail statistic, and the sum
of the lower and upper ``a = 1`` members is the Anderson–Darling statistic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from ._validation import check_stress
from .edf import OrderedUnitSample
from .exceptions import DivergentStatisticError, DomainError

__all__ = [
    "BRANCH_TOL",
    "StatSpec",
    "StatResult",
    "weight",
    "lower_tail_stat",
    "upper_tail_stat",
    "cvm_stat",
    "ad_stat",
    "ad_classical",
    "quadrature_oracle",
    "evaluate",
    "lower_tail_batch",
    "batch_evaluate",
]

#: Tolerance for snapping the stress parameter onto 1, 2 or 3.
BRANCH_TOL = 1e-9

Side = Literal["lower", "upper", "both"]
Branch = Literal["general", "a0-cvm", "a1", "a2", "ad"]


def _near(x: float, k: float) -> bool:
    return abs(x - k) < BRANCH_TOL


@dataclass(frozen=True)
class StatSpec:
    """One member of the statistic family: tail side plus stress parameter.

    ``side="both"`` is only defined for stress 1 (Anderson–Darling).
    """

    side: Side = "lower"
    stress: float = 1.0

    def __post_init__(self):
        if self.side not in ("lower", "upper", "both"):
            raise DomainError(f"unknown side {self.side!r}")
        stress = check_stress(self.stress)
        if self.side == "both" and not _near(stress, 1.0):
            raise DomainError("two-sided weights are only supported for a = b = 1 (Anderson-Darling)")
        object.__setattr__(self, "stress", stress)

    @classmethod
    def named(cls, name: str) -> "StatSpec":
        """``cvm``, ``al`` (Ahmad lower tail), ``au`` (upper tail) or ``ad``."""
        table = {
            "cvm": cls("lower", 0.0),
            "al": cls("lower", 1.0),
            "au": cls("upper", 1.0),
            "ad": cls("both", 1.0),
        }
        try:
            return table[name.lower()]
        except KeyError:
            raise DomainError(f"unknown statistic name {name!r}") from None

    @property
    def evaluable(self) -> bool:
        return not _near(self.stress, 3.0)

    @property
    def label(self) -> str:
        if self.side == "both":
            return "ad"
        sym = "a" if self.side == "lower" else "b"
        return f"{self.side}({sym}={self.stress:g})"


@dataclass(frozen=True)
class StatResult:
    value: float
    n: int
    spec: StatSpec
    branch: Branch
    clamped: int = 0


def weight(t: float, a: float, b: float) -> float:
    """Weight ``1 / (t^a (1-t)^b)`` for ``0 < t < 1``."""
    if not 0.0 < t < 1.0:
        raise DomainError(f"weight is defined on the open unit interval, got t={t!r}")
    a = check_stress(a, name="a")
    b = check_stress(b, name="b")
    return t ** (-a) * (1.0 - t) ** (-b)


def _as_unit(u) -> OrderedUnitSample:
    return u if isinstance(u, OrderedUnitSample) else OrderedUnitSample(u)


def _branch(a: float) -> Branch:
    if _near(a, 3.0):
        raise DivergentStatisticError(
            "the stress-3 statistic diverges; no finite computing formula exists"
        )
    if _near(a, 1.0):
        return "a1"
    if _near(a, 2.0):
        return "a2"
    if a == 0.0:
        return "a0-cvm"
    return "general"


def _terms(u: np.ndarray, a: float, branch: Branch) -> tuple[float, np.ndarray]:
    """Constant part and per-observation terms of the lower-tail formula.

    ``u`` may be 1-D or 2-D (one sample per row, sorted along the last axis).
    """
    n = u.shape[-1]
    c = (2.0 * np.arange(1, n + 1) - 1.0) / n
    if branch == "a1":
        return -1.5 * n, 2.0 * u - c * np.log(u)
    if branch == "a2":
        return 0.0, c / u + 2.0 * np.log(u)
    const = 2.0 * n / ((1.0 - a) * (2.0 - a) * (3.0 - a))
    return const, (2.0 / (2.0 - a)) * u ** (2.0 - a) - c / (1.0 - a) * u ** (1.0 - a)


def lower_tail_stat(u, a: float) -> StatResult:
    """Lower-tail statistic with stress ``a``.

    Parameters
    ----------
    u : OrderedUnitSample or array-like
        Sorted probability-integral-transformed sample.
    a : float
        Stress parameter, ``a >= 0`` and not 3.

    Returns
    -------
    StatResult
        ``clamped`` counts zeros that were lifted to a tiny positive value
        because the chosen branch takes ``ln(u)`` or a negative power of ``u``.

    Raises
    ------
    DivergentStatisticError
        For ``a == 3`` (within :data:`BRANCH_TOL`).
    """
    u = _as_unit(u)
    a = check_stress(a, name="a")
    branch = _branch(a)
    if a >= 1.0 - BRANCH_TOL:
        vals, clamped = u.guarded()
    else:
        vals, clamped = u.u, 0
    with np.errstate(over="ignore", divide="ignore"):
        const, terms = _terms(vals, a, branch)
    value = math.fsum([const, *terms.tolist()])
    return StatResult(value, u.n, StatSpec("lower", a), branch, clamped)


def upper_tail_stat(u, b: float) -> StatResult:
    """Upper-tail statistic: the lower-tail formula on the reflected sample."""
    u = _as_unit(u)
    res = lower_tail_stat(u.reflect(), b)
    return StatResult(res.value, res.n, StatSpec("upper", res.spec.stress), res.branch, res.clamped)


def cvm_stat(u) -> StatResult:
    """Cramér–von Mises ``W_n^2 = 1/(12n) + Σ ((2i-1)/(2n) - u_(i))^2``."""
    u = _as_unit(u)
    n = u.n
    mid = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    value = math.fsum([1.0 / (12.0 * n), *((mid - u.u) ** 2).tolist()])
    return StatResult(value, n, StatSpec("lower", 0.0), "a0-cvm", 0)


def ad_stat(u) -> StatResult:
    """Anderson–Darling statistic as lower(a=1) + upper(b=1)."""
    u = _as_unit(u)
    lo = lower_tail_stat(u, 1.0)
    hi = upper_tail_stat(u, 1.0)
    return StatResult(lo.value + hi.value, u.n, StatSpec("both", 1.0), "ad", lo.clamped + hi.clamped)


def ad_classical(u) -> float:
    """Textbook form ``-n - (1/n) Σ (2i-1) [ln u_(i) + ln(1 - u_(n+1-i))]``."""
    u = _as_unit(u).u
    n = u.size
    c = 2.0 * np.arange(1, n + 1) - 1.0
    with np.errstate(divide="ignore"):
        s = c * (np.log(u) + np.log1p(-u[::-1]))
    return -n - math.fsum(s.tolist()) / n


def evaluate(u, spec: StatSpec) -> StatResult:
    """Evaluate the family member described by ``spec``."""
    if spec.side == "both":
        return ad_stat(u)
    if spec.side == "upper":
        return upper_tail_stat(u, spec.stress)
    return lower_tail_stat(u, spec.stress)


def lower_tail_batch(U: np.ndarray, a: float) -> np.ndarray:
    """Row-wise lower-tail statistic for a 2-D array of sorted unit samples.

    Exact zeros are lifted the same way as in :func:`lower_tail_stat`.
    Uses numpy's pairwise summation rather than exact summation.
    """
    U = np.asarray(U, dtype=np.float64)
    branch = _branch(a)
    if a >= 1.0 - BRANCH_TOL:
        U = np.where(U == 0.0, 1e-300, U)
    with np.errstate(over="ignore", divide="ignore"):
        const, terms = _terms(U, a, branch)
    return const + terms.sum(axis=-1)


def batch_evaluate(U: np.ndarray, spec: StatSpec) -> np.ndarray:
    """Row-wise :func:`evaluate` for sorted samples stacked in rows."""
    U = np.asarray(U, dtype=np.float64)
    if spec.side == "lower":
        return lower_tail_batch(U, spec.stress)
    refl = 1.0 - U[..., ::-1]
    if spec.side == "upper":
        return lower_tail_batch(refl, spec.stress)
    return lower_tail_batch(U, 1.0) + lower_tail_batch(refl, 1.0)


# -- quadrature oracle --------------------------------------------------------


def _power_integral(lo: float, hi: float, p: float) -> float:
    """∫_lo^hi t^p dt for 0 <= lo <= hi."""
    if hi == lo:
        return 0.0
    q = p + 1.0
    if lo == 0.0:
        return hi**q / q if q > 0.0 else math.inf
    log_ratio = math.log(hi) - math.log(lo)
    if q == 0.0:
        return log_ratio
    # lo^q * (exp(q*log(hi/lo)) - 1) / q stays accurate as q -> 0
    return lo**q * math.expm1(q * log_ratio) / q


def _lower_oracle(u: np.ndarray, a: float) -> float:
    n = u.size
    knots = [0.0, *u.tolist(), 1.0]
    pieces = []
    for k in range(n + 1):
        lo, hi = knots[k], knots[k + 1]
        if hi <= lo:
            continue
        c = k / n
        piece = _power_integral(lo, hi, 2.0 - a)
        if c:
            piece += c * c * _power_integral(lo, hi, -a) - 2.0 * c * _power_integral(lo, hi, 1.0 - a)
        pieces.append(piece)
    total = math.fsum(pieces)
    if not math.isfinite(total):
        raise DivergentStatisticError(
            f"the defining integral diverges for stress {a:g} on this sample"
        )
    return n * total


def quadrature_oracle(u, a: float, b: float = 0.0) -> float:
    """The defining integral ``n ∫ (F_n(t) - t)^2 w(t) dt`` integrated exactly.

    ``F_n`` is constant between consecutive order statistics, so each of the
    ``n + 1`` pieces is a sum of three power integrals done in closed form.
    Supported weights are the pure lower tail (``b = 0``), the pure upper
    tail (``a = 0``) and Anderson–Darling (``a = b = 1``, split by partial
    fractions).

    Raises
    ------
    DivergentStatisticError
        If any piece of the integral diverges.
    """
    u = _as_unit(u)
    a = check_stress(a, name="a")
    b = check_stress(b, name="b")
    if b == 0.0:
        return _lower_oracle(u.u, a)
    if a == 0.0:
        return _lower_oracle(u.reflect().u, b)
    if a == 1.0 and b == 1.0:
        return _lower_oracle(u.u, 1.0) + _lower_oracle(u.reflect().u, 1.0)
    raise DomainError("mixed weights other than a = b = 1 are not supported")
