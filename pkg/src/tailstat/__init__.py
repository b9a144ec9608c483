"""Tail-weighted goodness-of-fit statistics, their exact risk, an
order-statistic discrete distribution and automated GPD threshold selection."""

__version__ = "0.1.0"

from .edf import OrderedUnitSample, Sample, edf_value, to_ordered_unit
from .exceptions import (
    DivergentStatisticError,
    DomainError,
    InsufficientDataError,
    RangeError,
    TailStatError,
)
from .gpd import GeneralizedParetoTail, GpdParams, gpd_fit_mle
from .risk import RiskValue, risk_curve, risk_lower, risk_named, risk_upper
from .statistics import (
    StatResult,
    StatSpec,
    ad_stat,
    cvm_stat,
    lower_tail_stat,
    quadrature_oracle,
    upper_tail_stat,
)
from .threshold import ThresholdSelector, select_threshold

__all__ = [
    "__version__",
    "OrderedUnitSample",
    "Sample",
    "edf_value",
    "to_ordered_unit",
    "DivergentStatisticError",
    "DomainError",
    "InsufficientDataError",
    "RangeError",
    "TailStatError",
    "GeneralizedParetoTail",
    "GpdParams",
    "gpd_fit_mle",
    "RiskValue",
    "risk_curve",
    "risk_lower",
    "risk_named",
    "risk_upper",
    "StatResult",
    "StatSpec",
    "ad_stat",
    "cvm_stat",
    "lower_tail_stat",
    "quadrature_oracle",
    "upper_tail_stat",
    "ThresholdSelector",
    "select_threshold",
]
