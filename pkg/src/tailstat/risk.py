"""Closed-form risk (expected loss) of the tail statistics.

The expected value of the stress-``a`` statistic under a correctly specified
model is ``1 / ((2 - a)(3 - a))`` for every sample size. Rational inputs
(``int``, :class:`~fractions.Fraction`, :class:`~decimal.Decimal` or a
decimal string) are evaluated exactly; floats in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Literal, Union

from .exceptions import DomainError
from .statistics import BRANCH_TOL

__all__ = ["RiskValue", "risk_lower", "risk_upper", "risk_named", "risk_curve", "POLES"]

Number = Union[int, float, Fraction, Decimal, str]

POLES = (2, 3)


@dataclass(frozen=True)
class RiskValue:
    kind: Literal["finite", "divergent"]
    value: Fraction | float | None = None

    @property
    def finite(self) -> bool:
        return self.kind == "finite"

    def __float__(self) -> float:
        return float(self.value) if self.finite else math.inf

    @classmethod
    def divergent(cls) -> "RiskValue":
        return cls("divergent", None)


def _coerce(x: Number) -> Fraction | float:
    if isinstance(x, bool):
        raise DomainError("stress parameter must be a number")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, (Decimal, str)):
        try:
            return Fraction(Decimal(x))
        except (ArithmeticError, ValueError):
            raise DomainError(f"cannot parse stress parameter {x!r}") from None
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("stress parameter must be finite")
    return x


def _risk(s: Number) -> RiskValue:
    s = _coerce(s)
    if s < 0:
        raise DomainError(f"stress parameter must be >= 0, got {s}")
    if any(abs(s - p) < BRANCH_TOL for p in POLES):
        return RiskValue.divergent()
    if isinstance(s, Fraction):
        return RiskValue("finite", 1 / ((2 - s) * (3 - s)))
    return RiskValue("finite", 1.0 / ((2.0 - s) * (3.0 - s)))


def risk_lower(a: Number) -> RiskValue:
    """Risk of the lower-tail statistic with stress ``a``; poles at 2 and 3."""
    return _risk(a)


def risk_upper(b: Number) -> RiskValue:
    """Risk of the upper-tail statistic; same function of ``b`` by reflection."""
    return _risk(b)


def risk_named(which: str) -> RiskValue:
    """Risk of ``cvm`` (1/6), ``al`` (1/2) or ``ad`` (1)."""
    which = which.lower()
    if which == "cvm":
        return risk_lower(0)
    if which == "al":
        return risk_lower(1)
    if which == "ad":
        return RiskValue("finite", risk_lower(1).value + risk_upper(1).value)
    raise DomainError(f"unknown statistic name {which!r}")


def risk_curve(stress_grid: Iterable[Number]) -> list[tuple[Number, RiskValue]]:
    """Pointwise :func:`risk_lower` over a grid, poles flagged as divergent."""
    return [(s, risk_lower(s)) for s in stress_grid]
