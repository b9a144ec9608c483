"""Input validation helpers."""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils import check_array

from .exceptions import DomainError


def check_sample(X, *, name: str = "sample", min_size: int = 1) -> np.ndarray:
    """Return ``X`` as a finite 1-D float64 array.

    Accepts any array-like of shape ``(n,)`` or ``(n, 1)``.
    """
    try:
        arr = check_array(
            X,
            ensure_2d=False,
            dtype=np.float64,
            ensure_all_finite=True,
            ensure_min_samples=0,
        )
    except ValueError as exc:
        raise DomainError(f"{name}: {exc}") from exc
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise DomainError(f"{name} must be one-dimensional, got shape {arr.shape}")
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_size:
        raise DomainError(f"{name} needs at least {min_size} value(s), got {arr.size}")
    return arr


def check_stress(value, *, name: str = "stress") -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise DomainError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value) or value < 0.0:
        raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
    return value


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral):
        raise DomainError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise DomainError("seed must fit in an unsigned 64-bit integer")
    return seed
