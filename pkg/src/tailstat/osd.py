"""A one-parameter discrete distribution on ``{1, ..., n}`` built from
order-statistic beta ratios.

    p_i(nu) = (nu + 1)/n * B(i + nu, n - i + 1) / B(i, n - i + 1),   nu > -1

``nu = 0`` is the discrete uniform distribution; ``nu < 0`` puts more mass on
the left edge and ``nu > 0`` on the right edge. Raw moments have a closed form
in Stirling numbers of the second kind and falling factorials of ``n - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_seed
from .exceptions import DomainError
from .special import falling_factorial, ln_beta, stirling2

__all__ = [
    "NU_MIN",
    "OsdParams",
    "osd_pmf",
    "osd_pmf_alternative",
    "osd_pmf_vector",
    "osd_cdf",
    "osd_moment",
    "osd_mean",
    "osd_variance",
    "osd_sample",
    "order_stat_density",
    "m_k_direct",
]

#: Smallest accepted shape; at -1 the distribution degenerates.
NU_MIN = -1.0 + 1e-9


@dataclass(frozen=True)
class OsdParams:
    n: int
    nu: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        nu = float(self.nu)
        if not math.isfinite(nu) or nu < NU_MIN:
            raise DomainError(f"nu must be finite and > -1, got {self.nu!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "nu", nu)


def _check_index(params: OsdParams, i, name: str = "i") -> int:
    if int(i) != i or not 1 <= i <= params.n:
        raise DomainError(f"{name} must be an integer in [1, {params.n}], got {i!r}")
    return int(i)


def _ln_pmf(n: int, nu: float, i: int) -> float:
    return math.log(nu + 1.0) - math.log(n) + ln_beta(i + nu, n - i + 1) - ln_beta(i, n - i + 1)


def osd_pmf(params: OsdParams, i: int) -> float:
    """Probability of outcome ``i``, evaluated through log-beta differences."""
    i = _check_index(params, i)
    return math.exp(_ln_pmf(params.n, params.nu, i))


def osd_pmf_alternative(params: OsdParams, i: int) -> float:
    """Same probability from the gamma/rising-factorial form.

    ``Γ(n)/Γ(i) * (nu+1) / (nu+i)^(n-i+1)`` rewritten as a running product of
    ratios so that nothing overflows.
    """
    i = _check_index(params, i)
    n, nu = params.n, params.nu
    out = (nu + 1.0) / (nu + i)
    for j in range(i, n):
        out *= j / (nu + j + 1.0)
    return out


def osd_pmf_vector(params: OsdParams) -> np.ndarray:
    """All probabilities ``p_1, ..., p_n``."""
    return np.array([osd_pmf(params, i) for i in range(1, params.n + 1)])


def osd_cdf(params: OsdParams, s: int) -> float:
    """``F(s; nu) = B(n, nu+1) / B(s, nu+1)``."""
    s = _check_index(params, s, "s")
    if s == params.n:
        return 1.0
    return math.exp(ln_beta(params.n, params.nu + 1.0) - ln_beta(s, params.nu + 1.0))


def osd_moment(params: OsdParams, k: int) -> float:
    """Raw moment ``E[X^k]`` from the Stirling-number closed form."""
    if int(k) != k or not 0 <= k <= 32:
        raise DomainError("moment order must be an integer in [0, 32]")
    k = int(k)
    n, nu = params.n, params.nu
    terms = [
        stirling2(k + 1, l + 1) * (nu + 1.0) / (nu + 1.0 + l) * falling_factorial(n - 1, l)
        for l in range(k + 1)
    ]
    return math.fsum(terms)


def osd_mean(params: OsdParams) -> float:
    return 1.0 + (params.nu + 1.0) / (params.nu + 2.0) * (params.n - 1)


def osd_variance(params: OsdParams) -> float:
    n, nu = params.n, params.nu
    return (nu + 1.0) * (nu + n + 1.0) * (n - 1) / ((nu + 2.0) ** 2 * (nu + 3.0))


def _cdf_table(params: OsdParams) -> np.ndarray:
    table = np.array([osd_cdf(params, s) for s in range(1, params.n + 1)])
    table[-1] = 1.0
    return table


def osd_sample(params: OsdParams, count: int, seed: int) -> np.ndarray:
    """Inverse-CDF draws; each uniform is located by binary search."""
    if int(count) != count or count < 1:
        raise DomainError("count must be a positive integer")
    rng = np.random.default_rng(check_seed(seed))
    u = rng.random(int(count))
    idx = np.searchsorted(_cdf_table(params), u, side="left")
    return np.minimum(idx, params.n - 1).astype(np.int64) + 1


def order_stat_density(u: float, i: int, n: int) -> float:
    """Density of the ``i``-th of ``n`` uniform order statistics, a Beta(i, n-i+1)."""
    if int(n) != n or n < 1 or int(i) != i or not 1 <= i <= n:
        raise DomainError(f"need 1 <= i <= n, got i={i!r}, n={n!r}")
    if not 0.0 <= u <= 1.0:
        raise DomainError("u must lie in [0, 1]")
    i, n = int(i), int(n)
    if (u == 0.0 and i > 1) or (u == 1.0 and i < n):
        return 0.0
    log_num = (i - 1) * math.log(u) if i > 1 else 0.0
    log_num += (n - i) * math.log1p(-u) if i < n else 0.0
    return math.exp(log_num - ln_beta(i, n - i + 1))


def m_k_direct(n: int, nu: float, k: int) -> float:
    """``(nu+1)/n * Σ_i i^k B(i+nu, n-i+1)/B(i, n-i+1)`` summed term by term."""
    params = OsdParams(n, nu)
    if params.n > 10_000:
        raise DomainError("m_k_direct is limited to n <= 10000")
    terms = [i**k * math.exp(_ln_pmf(params.n, params.nu, i)) for i in range(1, params.n + 1)]
    return math.fsum(terms)
