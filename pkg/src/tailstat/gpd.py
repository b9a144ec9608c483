"""Generalized Pareto tail model: distribution functions, sampling and
maximum-likelihood fitting.

Parameterization is the usual peaks-over-threshold one, with the threshold as
location::

    F(x) = 1 - (1 + xi (x - u) / sigma) ** (-1 / xi),   x >= u

and the exponential limit at ``xi = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_sample
from .exceptions import DomainError, InsufficientDataError

__all__ = [
    "XI_ZERO_TOL",
    "GpdParams",
    "GpdFit",
    "gpd_cdf",
    "gpd_sf",
    "gpd_cdf_array",
    "gpd_sf_array",
    "gpd_sample",
    "gpd_loglik",
    "gpd_moment_start",
    "gpd_fit_mle",
    "fit_profile_batch",
    "GeneralizedParetoTail",
]

XI_ZERO_TOL = 1e-12

# profile-likelihood search over s = log1p(theta * max(y)), theta = xi / sigma
_S_GRID = np.linspace(-14.0, 14.0, 41)
_GOLDEN_ITERS = 48
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class GpdParams:
    xi: float
    sigma: float
    threshold: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.xi) and math.isfinite(self.threshold)):
            raise DomainError("GPD shape and threshold must be finite")
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise DomainError(f"GPD scale must be > 0, got {self.sigma!r}")

    @property
    def upper_endpoint(self) -> float:
        if self.xi < -XI_ZERO_TOL:
            return self.threshold - self.sigma / self.xi
        return math.inf


@dataclass(frozen=True)
class GpdFit:
    params: GpdParams
    loglik: float
    converged: bool
    n: int
    start_loglik: float


def _z(y, xi: float, sigma: float) -> np.ndarray:
    return np.maximum(np.asarray(y, dtype=np.float64), 0.0) / sigma


def gpd_sf_array(y, xi: float, sigma: float) -> np.ndarray:
    """Survival function of excesses ``y >= 0``; computed directly, not as 1 - cdf."""
    z = _z(y, xi, sigma)
    if abs(xi) < XI_ZERO_TOL:
        return np.exp(-z)
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = 1.0 + xi * z
        out = np.exp(-np.log1p(np.maximum(xi * z, -1.0)) / xi)
    return np.where(arg <= 0.0, 0.0, out)


def gpd_cdf_array(y, xi: float, sigma: float) -> np.ndarray:
    z = _z(y, xi, sigma)
    if abs(xi) < XI_ZERO_TOL:
        return -np.expm1(-z)
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = 1.0 + xi * z
        out = -np.expm1(-np.log1p(xi * z) / xi)
    return np.where(arg <= 0.0, 1.0, out)


def gpd_cdf(x: float, params: GpdParams) -> float:
    """Distribution function at ``x``; 1 beyond a finite upper endpoint."""
    if x < params.threshold:
        raise DomainError(f"x={x!r} lies below the threshold {params.threshold!r}")
    return float(gpd_cdf_array(x - params.threshold, params.xi, params.sigma))


def gpd_sf(x: float, params: GpdParams) -> float:
    if x < params.threshold:
        raise DomainError(f"x={x!r} lies below the threshold {params.threshold!r}")
    return float(gpd_sf_array(x - params.threshold, params.xi, params.sigma))


def gpd_sample(params: GpdParams, size, rng: np.random.Generator) -> np.ndarray:
    """Inverse-transform draws ``u + sigma * (V**(-xi) - 1) / xi`` with V uniform on (0, 1]."""
    v = 1.0 - rng.random(size)
    logv = np.log(v)
    if abs(params.xi) < XI_ZERO_TOL:
        y = -params.sigma * logv
    else:
        y = params.sigma * np.expm1(-params.xi * logv) / params.xi
    return params.threshold + y


def gpd_loglik(y, xi: float, sigma: float) -> float:
    """Log-likelihood of excesses ``y``; ``-inf`` outside the support."""
    y = np.asarray(y, dtype=np.float64)
    if sigma <= 0.0 or np.any(y < 0.0):
        return -math.inf
    m = y.size
    if abs(xi) < XI_ZERO_TOL:
        return -m * math.log(sigma) - float(y.sum()) / sigma
    arg = 1.0 + xi * y / sigma
    if np.any(arg <= 0.0):
        return -math.inf
    return -m * math.log(sigma) - (1.0 + 1.0 / xi) * float(np.log(arg).sum())


def gpd_moment_start(y) -> tuple[float, float]:
    """Method-of-moments ``(xi, sigma)`` from the excess mean and variance."""
    y = np.asarray(y, dtype=np.float64)
    mean = float(y.mean())
    var = float(y.var(ddof=1))
    ratio = mean * mean / var
    return 0.5 * (1.0 - ratio), 0.5 * mean * (ratio + 1.0)


def _profile(Y: np.ndarray, ymax: np.ndarray, s: np.ndarray):
    """Per-row profile log-likelihood (divided by m) at ``s``.

    Returns ``(value, xi, sigma)``; infeasible points (``xi < -1``) get -inf.
    """
    t = np.expm1(s)
    theta = t / ymax
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = np.log1p(theta[:, None] * Y).mean(axis=1)
        small = np.abs(theta) < 1e-300
        sigma = np.where(small, Y.mean(axis=1), xi / np.where(small, 1.0, theta))
        val = -np.log(sigma) - 1.0 - xi
    bad = ~np.isfinite(val) | (xi < -1.0) | (sigma <= 0.0)
    return np.where(bad, -np.inf, val), xi, sigma


def fit_profile_batch(Y: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Maximum-likelihood GPD fits for every row of ``Y`` at once.

    For fixed ``theta = xi / sigma`` the likelihood is maximized by
    ``xi = mean(log1p(theta * y))``, which leaves a one-dimensional profile in
    ``theta``. It is scanned on a fixed grid and refined by golden-section
    search around the best grid point.

    Returns
    -------
    xi, sigma, loglik, interior
        ``interior`` is False where the optimum sits on the search boundary.
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    R, m = Y.shape
    ymax = Y.max(axis=1)
    rows = np.arange(R)

    grid_vals = np.empty((R, _S_GRID.size))
    for j, s in enumerate(_S_GRID):
        grid_vals[:, j] = _profile(Y, ymax, np.full(R, s))[0]
    best = np.argmax(grid_vals, axis=1)
    interior = (best > 0) & (best < _S_GRID.size - 1)

    lo = _S_GRID[np.maximum(best - 1, 0)]
    hi = _S_GRID[np.minimum(best + 1, _S_GRID.size - 1)]
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1 = _profile(Y, ymax, x1)[0]
    f2 = _profile(Y, ymax, x2)[0]
    for _ in range(_GOLDEN_ITERS):
        left = f1 >= f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        new_x = np.where(left, hi - _INV_PHI * (hi - lo), lo + _INV_PHI * (hi - lo))
        f_new = _profile(Y, ymax, new_x)[0]
        x2, f2, x1, f1 = (
            np.where(left, x1, new_x),
            np.where(left, f1, f_new),
            np.where(left, new_x, x2),
            np.where(left, f_new, f2),
        )
    s_hat = np.where(f1 >= f2, x1, x2)
    val, xi, sigma = _profile(Y, ymax, s_hat)

    # keep the grid point if refinement did not improve on it
    grid_best = grid_vals[rows, best]
    use_grid = ~(val >= grid_best)
    if np.any(use_grid):
        gv, gxi, gsig = _profile(Y, ymax, _S_GRID[best])
        val = np.where(use_grid, gv, val)
        xi = np.where(use_grid, gxi, xi)
        sigma = np.where(use_grid, gsig, sigma)
    return xi, sigma, val * m, interior & np.isfinite(val)


def gpd_fit_mle(excesses, min_count: int = 30) -> GpdFit:
    """Maximum-likelihood fit of a GPD (threshold 0) to non-negative excesses.

    The profile-likelihood search is checked against the method-of-moments
    start; if the start is better the fit is polished by L-BFGS-B on
    ``(xi, log sigma)`` from there.

    Raises
    ------
    InsufficientDataError
        Fewer than ``min_count`` excesses, or all excesses equal.
    """
    y = check_sample(excesses, name="excesses", min_size=0)
    if y.size < max(int(min_count), 2):
        raise InsufficientDataError(f"need at least {min_count} excesses, got {y.size}")
    if np.any(y < 0.0):
        raise DomainError("excesses must be non-negative")
    if np.ptp(y) == 0.0:
        raise InsufficientDataError("excesses are constant; the likelihood is degenerate")

    xi, sigma, ll, interior = (float(v[0]) for v in fit_profile_batch(y[None, :]))
    interior = bool(interior)
    xi0, sigma0 = gpd_moment_start(y)
    ll0 = gpd_loglik(y, xi0, sigma0) if sigma0 > 0 else -math.inf

    if not ll >= ll0:
        res = optimize.minimize(
            lambda p: -gpd_loglik(y, p[0], math.exp(p[1])) if math.isfinite(p[1]) else math.inf,
            x0=[xi0, math.log(sigma0)],
            method="L-BFGS-B",
            bounds=[(-1.0, 5.0), (None, None)],
        )
        ll_pol = -float(res.fun)
        if ll_pol >= ll0:
            xi, sigma, ll = float(res.x[0]), math.exp(float(res.x[1])), ll_pol
            interior = bool(res.success)
        else:
            xi, sigma, ll, interior = xi0, sigma0, ll0, False
    converged = interior and math.isfinite(ll) and ll >= ll0
    return GpdFit(GpdParams(xi, sigma, 0.0), ll, converged, int(y.size), ll0)


class GeneralizedParetoTail(TransformerMixin, BaseEstimator):
    """Peaks-over-threshold GPD model.

    ``fit`` estimates shape and scale from the observations above
    ``threshold``; ``transform`` returns their probability-integral transform
    under the fitted tail (NaN for observations below the threshold).

    Parameters
    ----------
    threshold : float, default=0.0
    min_excesses : int, default=30

    Attributes
    ----------
    shape_, scale_ : float
    loglik_ : float
    converged_ : bool
    n_excesses_ : int
    """

    def __init__(self, threshold: float = 0.0, min_excesses: int = 30):
        self.threshold = threshold
        self.min_excesses = min_excesses

    def fit(self, X, y=None):
        x = check_sample(X)
        excess = x[x > self.threshold] - self.threshold
        fit = gpd_fit_mle(excess, self.min_excesses)
        self.shape_ = fit.params.xi
        self.scale_ = fit.params.sigma
        self.loglik_ = fit.loglik
        self.converged_ = fit.converged
        self.n_excesses_ = fit.n
        return self

    @property
    def params_(self) -> GpdParams:
        check_is_fitted(self, "shape_")
        return GpdParams(self.shape_, self.scale_, float(self.threshold))

    def transform(self, X):
        check_is_fitted(self, "shape_")
        x = check_sample(X)
        out = gpd_cdf_array(x - self.threshold, self.shape_, self.scale_)
        return np.where(x >= self.threshold, out, np.nan)

    def score(self, X, y=None):
        """Mean log-likelihood per excess."""
        check_is_fitted(self, "shape_")
        x = check_sample(X)
        excess = x[x > self.threshold] - self.threshold
        return gpd_loglik(excess, self.shape_, self.scale_) / max(excess.size, 1)
