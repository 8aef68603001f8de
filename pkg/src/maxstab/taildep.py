"""Tail-decay check for asymptotic independence.

On common Gumbel margins the joint survival ``Pr{X_i > x, i in D}`` decays like
``exp(-x / eta_D)``; ``eta_D = 1`` under asymptotic dependence (as for any
non-trivial max-stable field) and ``eta_D < 1`` under asymptotic independence.
Equivalently the Frechet-scale minimum over ``D`` is regularly varying with
index ``-1 / eta_D``, so a Hill estimator on that minimum estimates ``eta_D``.
"""
from dataclasses import dataclass
from math import ceil

import numpy as np

from .data import Scale
from .errors import DomainError, NumericError

DEFAULT_TAIL_FRACTION = 0.1
SENSITIVITY_FRACTIONS = (0.05, 0.1, 0.2)
MIN_TAIL = 10


@dataclass(frozen=True)
class EtaEstimate:
    eta: float
    se: float
    ci_lo: float
    ci_hi: float
    n_exceed: int
    subset: tuple = ()


@dataclass(frozen=True)
class EtaFailure:
    """Marker returned in place of an estimate when a subset cannot be fitted."""

    subset: tuple
    reason: str


@dataclass(frozen=True)
class SurvivalCurve:
    x_grid: np.ndarray
    log_surv: np.ndarray
    subset: tuple


def _subset_index(matrix, subset):
    idx = np.asarray(subset, dtype=np.intp).ravel()
    if idx.size == 0:
        raise DomainError("subset must be non-empty")
    if idx.min() < 0 or idx.max() >= matrix.m:
        raise DomainError("subset index out of range")
    return idx


def structure_min(matrix, subset):
    """Per-replicate minimum over ``subset`` on the unit Frechet scale."""
    matrix.require_scale(Scale.GUMBEL)
    idx = _subset_index(matrix, subset)
    return np.exp(matrix.values[:, idx].min(axis=1))


def hill_eta(t_values, tail_fraction=DEFAULT_TAIL_FRACTION, subset=()):
    """Hill estimate of ``eta`` from the upper order statistics of ``t_values``.

    Uses the ``ceil(tail_fraction * n)`` largest values above the next order
    statistic as threshold. The estimate is truncated to ``(0, 1]`` and the
    interval is the normal one, ``eta +/- 1.96 eta / sqrt(k)``, cut at 1.
    """
    t = np.sort(np.asarray(t_values, dtype=float).ravel())
    if not 0 < tail_fraction < 1:
        raise DomainError("tail_fraction must lie in (0, 1)")
    if np.any(~(t > 0)) or np.any(~np.isfinite(t)):
        raise DomainError("values must be positive and finite")
    n = t.size
    k = ceil(tail_fraction * n)
    if k < MIN_TAIL or k >= n:
        raise NumericError("insufficient tail sample")
    threshold = t[n - k - 1]
    eta = float(np.mean(np.log(t[n - k:] / threshold)))
    if not eta > 0:
        raise NumericError("degenerate tail")
    eta = min(eta, 1.0)
    se = eta / np.sqrt(k)
    lo = max(eta - 1.96 * se, np.finfo(float).tiny)
    hi = min(eta + 1.96 * se, 1.0)
    return EtaEstimate(eta, float(se), float(lo), float(hi), int(k), tuple(subset))


def eta_for_subsets(matrix, family, tail_fraction=DEFAULT_TAIL_FRACTION):
    """:func:`hill_eta` for every subset; failures become :class:`EtaFailure`."""
    out = []
    for s in family.subsets:
        try:
            out.append(hill_eta(structure_min(matrix, s), tail_fraction, s))
        except (NumericError, DomainError) as exc:
            out.append(EtaFailure(tuple(s), str(exc)))
    return out


def survival_curve(matrix, subset, x_grid):
    """Log empirical joint survival of ``subset`` on ``x_grid``.

    Grid points beyond the largest joint exceedance (log survival ``-inf``)
    are dropped.
    """
    matrix.require_scale(Scale.GUMBEL)
    idx = _subset_index(matrix, subset)
    x = np.asarray(x_grid, dtype=float).ravel()
    if x.size == 0 or np.any(np.diff(x) <= 0):
        raise DomainError("x_grid must be strictly increasing")
    low = np.sort(matrix.values[:, idx].min(axis=1))
    n_above = low.size - np.searchsorted(low, x, side="right")
    keep = n_above > 0
    if not keep.any():
        raise DomainError("no joint exceedances on the grid")
    return SurvivalCurve(x[keep], np.log(n_above[keep] / low.size), tuple(int(j) for j in idx))
