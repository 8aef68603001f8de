"""Gumbel/Frechet algebra, marginal transforms and the subset location MLE."""
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp
from scipy.stats import rankdata

from .data import ReplicateMatrix, Scale
from .errors import DataError, DomainError


@dataclass(frozen=True)
class LocationEstimate:
    """Maximum-likelihood location of a unit-scale Gumbel sample.

    ``mu_hat`` is the unconstrained estimate, ``mu_clamped`` the estimate
    restricted to ``[0, log k]``.
    """

    mu_hat: float
    mu_clamped: float
    k: int
    n: int

    @property
    def clamped(self):
        return self.mu_clamped != self.mu_hat


def _as_float(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def gumbel_cdf(z):
    """Standard Gumbel CDF ``exp(-exp(-z))``; scalar or array input."""
    z, scalar = _as_float(z)
    if np.any(np.isnan(z)):
        raise DomainError("non-finite input")
    out = np.exp(-np.exp(-z))
    return float(out) if scalar else out


def gumbel_quantile(p):
    """Inverse of :func:`gumbel_cdf` on the open unit interval."""
    p, scalar = _as_float(p)
    if np.any(~((p > 0) & (p < 1))):
        raise DomainError("probability must lie strictly between 0 and 1")
    out = -np.log(-np.log(p))
    return float(out) if scalar else out


def frechet_to_gumbel(values):
    values = np.asarray(values, dtype=float)
    if np.any(~(values > 0)):
        raise DomainError("Frechet values must be strictly positive")
    return np.log(values)


def gumbel_to_frechet(values):
    return np.exp(np.asarray(values, dtype=float))


def empirical_to_gumbel(matrix):
    """Rank-transform each site of a raw-scale matrix to standard Gumbel.

    Value with (average) rank ``r`` among ``n`` becomes
    ``-log(-log(r / (n + 1)))``.
    """
    matrix.require_scale(Scale.RAW)
    values = matrix.values
    n = values.shape[0]
    if n < 2:
        raise DataError("need at least two replicates to rank-transform margins")
    if np.any(~np.isfinite(values)):
        raise DataError("raw data must be finite")
    degenerate = np.all(values == values[0], axis=0)
    if np.any(degenerate):
        j = int(np.flatnonzero(degenerate)[0])
        raise DataError(f"degenerate margin at site {matrix.site_ids[j]!r}")
    ranks = rankdata(values, method="average", axis=0)
    return ReplicateMatrix(
        gumbel_quantile(ranks / (n + 1)), Scale.GUMBEL, matrix.grid, matrix.site_ids
    )


def location_mle(y, axis=0):
    """Closed-form Gumbel(mu, 1) MLE along ``axis``.

    ``mu_hat = log n - logsumexp(-y)``, which is ``-log(mean(exp(-y)))``
    without overflow for large ``|y|``.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[axis]
    return np.log(n) - logsumexp(-y, axis=axis)


def fit_gumbel_location(sample, k):
    """Fit the location of a unit-scale Gumbel sample with the bound ``[0, log k]``.

    Parameters
    ----------
    sample : array_like
        Finite values of a subset maximum ``Y_D`` on the Gumbel scale.
    k : int
        Cardinality of the subset; the location of the maximum of ``k``
        standard Gumbel variables is at most ``log k``.

    Returns
    -------
    LocationEstimate
    """
    y = np.asarray(sample, dtype=float).ravel()
    if y.size == 0:
        raise DomainError("sample must be non-empty")
    if not np.all(np.isfinite(y)):
        raise DomainError("sample must be finite")
    if int(k) != k or k < 1:
        raise DomainError("k must be an integer >= 1")
    k = int(k)
    mu_hat = float(location_mle(y))
    mu_clamped = float(min(max(mu_hat, 0.0), np.log(k)))
    return LocationEstimate(mu_hat, mu_clamped, k, int(y.size))
