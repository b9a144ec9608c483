"""Special functions and combinatorial primitives.

Log-gamma comes from :func:`math.lgamma` and the digamma function from
:func:`scipy.special.digamma`; both are accurate to a few ulp on the
positive reals. Stirling numbers are exact Python integers.
"""

from __future__ import annotations

import math
from functools import lru_cache

from scipy import special as _sc

from .exceptions import DomainError, RangeError

__all__ = [
    "ln_gamma",
    "ln_beta",
    "digamma",
    "stirling2",
    "falling_factorial",
    "rising_factorial",
    "STIRLING_MAX",
]

#: Largest index for which :func:`stirling2` is served.
STIRLING_MAX = 64


def _check_positive(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"{name} requires a finite positive argument, got {x!r}")
    return x


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    return math.lgamma(_check_positive("ln_gamma", x))


def ln_beta(p: float, q: float) -> float:
    """Natural log of the beta function ``B(p, q)``."""
    p = _check_positive("ln_beta", p)
    q = _check_positive("ln_beta", q)
    return math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q)


def digamma(x: float) -> float:
    """Digamma function ``psi(x) = d/dx ln Gamma(x)`` for ``x > 0``."""
    return float(_sc.digamma(_check_positive("digamma", x)))


@lru_cache(maxsize=None)
def _stirling_row(k: int) -> tuple[int, ...]:
    if k == 0:
        return (1,)
    prev = _stirling_row(k - 1)
    row = [0] * (k + 1)
    for l in range(1, k + 1):
        left = prev[l] if l < k else 0
        row[l] = l * left + prev[l - 1]
    return tuple(row)


def stirling2(k: int, l: int) -> int:
    """Stirling number of the second kind ``S(k, l)``.

    Counts the partitions of a ``k``-element set into ``l`` non-empty blocks.
    Built row by row from ``S(k+1, l) = l*S(k, l) + S(k, l-1)`` in exact
    integer arithmetic.

    Raises
    ------
    RangeError
        If ``k`` or ``l`` exceeds :data:`STIRLING_MAX`.
    """
    k, l = int(k), int(l)
    if k < 0 or l < 0:
        raise DomainError(f"stirling2 needs non-negative indices, got ({k}, {l})")
    if k > STIRLING_MAX or l > STIRLING_MAX:
        raise RangeError(f"stirling2 is limited to indices <= {STIRLING_MAX}")
    if l > k:
        return 0
    return _stirling_row(k)[l]


def falling_factorial(x: float, l: int) -> float:
    """``x (x-1) ... (x-l+1)``; the empty product (``l == 0``) is 1.

    Integer ``x`` gives an exact integer result.
    """
    if l < 0:
        raise DomainError("falling_factorial needs l >= 0")
    out = 1 if isinstance(x, int) else 1.0
    for j in range(int(l)):
        out *= x - j
    return out


def rising_factorial(x: float, l: int) -> float:
    """``x (x+1) ... (x+l-1)``; the empty product (``l == 0``) is 1."""
    if l < 0:
        raise DomainError("rising_factorial needs l >= 0")
    out = 1 if isinstance(x, int) else 1.0
    for j in range(int(l)):
        out *= x + j
    return out
