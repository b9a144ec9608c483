"""Samples, the empirical distribution function and the probability-integral
transform onto ordered unit samples."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from scipy import special as _sc

from ._validation import check_sample
from .exceptions import DomainError

__all__ = [
    "Sample",
    "OrderedUnitSample",
    "ModelCdf",
    "UniformCdf",
    "ExponentialCdf",
    "NormalCdf",
    "GpdCdf",
    "PitCdf",
    "edf_value",
    "to_ordered_unit",
    "CLAMP_EPS",
]

#: Replacement for an exact zero where a formula takes ``ln(u)`` or ``1/u``.
CLAMP_EPS = 1e-300


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Sample:
    """Finite real observations; ties are kept."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(check_sample(self.values)))

    @property
    def n(self) -> int:
        return int(self.values.size)

    def ordered(self) -> np.ndarray:
        return np.sort(self.values, kind="stable")


@dataclass(frozen=True)
class OrderedUnitSample:
    """Ascending values in ``[0, 1]``.

    Typically the probability-integral transform ``F(x_(i))`` of a sorted
    sample.
    """

    u: np.ndarray

    def __post_init__(self):
        u = _frozen(check_sample(self.u, name="unit sample"))
        if u[0] < 0.0 or u[-1] > 1.0:
            raise DomainError("unit sample values must lie in [0, 1]")
        if np.any(np.diff(u) < 0.0):
            raise DomainError("unit sample must be sorted ascending")
        object.__setattr__(self, "u", u)

    @classmethod
    def from_values(cls, values) -> "OrderedUnitSample":
        """Sort arbitrary values in ``[0, 1]`` (e.g. user supplied PIT values)."""
        return cls(np.sort(check_sample(values, name="unit sample"), kind="stable"))

    @property
    def n(self) -> int:
        return int(self.u.size)

    def reflect(self) -> "OrderedUnitSample":
        """``u'_(i) = 1 - u_(n+1-i)``, the sample seen from the other tail."""
        return OrderedUnitSample(1.0 - self.u[::-1])

    def guarded(self) -> tuple[np.ndarray, int]:
        """Copy of ``u`` with exact zeros lifted to :data:`CLAMP_EPS`."""
        zero = self.u == 0.0
        count = int(zero.sum())
        if not count:
            return self.u, 0
        return np.where(zero, CLAMP_EPS, self.u), count

    def __len__(self) -> int:
        return self.n


class ModelCdf(Protocol):
    """A continuous model distribution function."""

    def cdf(self, x: np.ndarray) -> np.ndarray: ...

    def sf(self, x: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class UniformCdf:
    low: float = 0.0
    high: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.low) and math.isfinite(self.high) and self.high > self.low):
            raise DomainError("uniform model needs finite low < high")

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.clip((x - self.low) / (self.high - self.low), 0.0, 1.0)

    def sf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.clip((self.high - x) / (self.high - self.low), 0.0, 1.0)


@dataclass(frozen=True)
class ExponentialCdf:
    rate: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise DomainError("exponential model needs rate > 0")

    def cdf(self, x):
        x = np.maximum(np.asarray(x, dtype=np.float64), 0.0)
        return -np.expm1(-self.rate * x)

    def sf(self, x):
        x = np.maximum(np.asarray(x, dtype=np.float64), 0.0)
        return np.exp(-self.rate * x)


@dataclass(frozen=True)
class NormalCdf:
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError("normal model needs sigma > 0")

    def cdf(self, x):
        return _sc.ndtr((np.asarray(x, dtype=np.float64) - self.mu) / self.sigma)

    def sf(self, x):
        return _sc.ndtr((self.mu - np.asarray(x, dtype=np.float64)) / self.sigma)


@dataclass(frozen=True)
class GpdCdf:
    """Generalized Pareto with the threshold as location."""

    xi: float
    sigma: float
    threshold: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError("GPD needs scale sigma > 0")

    def _excess(self, x):
        y = np.asarray(x, dtype=np.float64) - self.threshold
        if np.any(y < 0.0):
            raise DomainError("GPD model is undefined below its threshold")
        return y

    def cdf(self, x):
        from .gpd import gpd_cdf_array

        return gpd_cdf_array(self._excess(x), self.xi, self.sigma)

    def sf(self, x):
        from .gpd import gpd_sf_array

        return gpd_sf_array(self._excess(x), self.xi, self.sigma)


class PitCdf:
    """Identity map for data that are already probability-integral transformed."""

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        if np.any((x < 0.0) | (x > 1.0)):
            raise DomainError("pre-transformed values must lie in [0, 1]")
        return x.copy()

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def __repr__(self):
        return "PitCdf()"


def edf_value(sample, x: float) -> float:
    """Empirical distribution function ``F_n(x) = #{X_i <= x} / n``."""
    if not isinstance(sample, Sample):
        sample = Sample(sample)
    ordered = sample.ordered()
    k = int(np.searchsorted(ordered, x, side="right"))
    return k / sample.n


def to_ordered_unit(sample, cdf: ModelCdf) -> OrderedUnitSample:
    """Probability-integral transform of ``sample`` under ``cdf``, sorted.

    Raises
    ------
    DomainError
        If the model cannot be evaluated at some observation or returns
        values outside ``[0, 1]``.
    """
    if not isinstance(sample, Sample):
        sample = Sample(sample)
    u = np.asarray(cdf.cdf(sample.ordered()), dtype=np.float64)
    if u.shape != (sample.n,) or not np.all(np.isfinite(u)):
        raise DomainError("model CDF returned non-finite values")
    if np.any((u < 0.0) | (u > 1.0)):
        raise DomainError("model CDF returned values outside [0, 1]")
    # a monotone CDF keeps the order; sorting again guards against rounding wiggles
    return OrderedUnitSample(np.sort(u, kind="stable"))
