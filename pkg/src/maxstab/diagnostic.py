"""Max-stability diagnostic based on pooled standardised subset maxima.

For a subset ``D`` of sites, the maximum ``Y_D`` of a max-stable field with
standard Gumbel margins is Gumbel with unit scale and location
``mu_D in [0, log |D|]``. Subtracting an estimate of ``mu_D`` and pooling over
replicates and many subsets of one size ``k`` gives a sample that should be
standard Gumbel. The departure is shown as a P-P difference curve with
pointwise block-bootstrap bands (whole replicates are resampled).
"""
from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from . import _rng
from .data import Scale
from .errors import DataError, DomainError
from .margins import LocationEstimate, gumbel_quantile, location_mle

DEFAULT_P_GRID = np.linspace(0.005, 0.995, 199)
DEFAULT_COUNT = 500
DEFAULT_N_BOOT = 250
DEFAULT_LEVEL = 0.95

# families up to this size are enumerated rather than rejection-sampled
_ENUMERATE_LIMIT = 200_000


@dataclass(frozen=True)
class SubsetFamily:
    k: int
    m: int
    subsets: tuple
    exhausted: bool = False  # requested count exceeded the admissible family

    def __post_init__(self):
        if not self.subsets:
            raise DomainError("subset family must be non-empty")
        subsets = tuple(tuple(int(j) for j in s) for s in self.subsets)
        for s in subsets:
            if len(s) != self.k or len(set(s)) != self.k:
                raise DomainError(f"subset {s} does not have {self.k} distinct indices")
        if len({tuple(sorted(s)) for s in subsets}) != len(subsets):
            raise DomainError("duplicate subsets in family")
        object.__setattr__(self, "subsets", subsets)

    def __len__(self):
        return len(self.subsets)

    def as_array(self):
        return np.array(self.subsets, dtype=np.intp).reshape(len(self.subsets), self.k)


@dataclass(frozen=True)
class SubsetStats:
    subset: tuple
    mu: LocationEstimate

    @property
    def clamped(self):
        return self.mu.clamped


@dataclass(frozen=True)
class PPCurve:
    """Rescaled P-P curve: empirical minus model probability on ``p_grid``."""

    p_grid: np.ndarray
    diff: np.ndarray
    n_pooled: int
    band_lo: np.ndarray | None = None
    band_hi: np.ndarray | None = None
    n_boot: int = 0
    level: float | None = None


@dataclass(frozen=True)
class DiagnosticResult:
    k: int
    curve: PPCurve
    per_subset: tuple
    reject: bool
    max_abs_diff: float
    family: SubsetFamily

    @property
    def clamped_fraction(self):
        return float(np.mean([s.clamped for s in self.per_subset]))

    @property
    def coverage(self):
        """Fraction of grid points whose band contains zero."""
        c = self.curve
        return float(np.mean((c.band_lo <= 0) & (0 <= c.band_hi)))


def _within_diameter(subset, dist, max_diameter):
    idx = np.asarray(subset)
    return bool(dist[np.ix_(idx, idx)].max() <= max_diameter)


def sample_subsets(m, k, count, seed, max_diameter=None, grid=None):
    """Draw ``count`` distinct ``k``-subsets of ``range(m)`` uniformly.

    With ``max_diameter`` only subsets whose sites are all within that distance
    of one another are admissible (``grid`` is then required). When ``count``
    is at least the size of the admissible family, the whole family is returned
    once and ``exhausted`` is set.
    """
    if not 1 <= k <= m:
        raise DomainError(f"need 1 <= k <= m, got k={k}, m={m}")
    if count < 1:
        raise DomainError("count must be >= 1")
    dist = None
    if max_diameter is not None:
        if grid is None:
            raise DomainError("max_diameter requires site coordinates")
        if grid.m != m:
            raise DomainError("grid size does not match m")
        dist = grid.distances()
    rng = _rng.substream(seed, _rng.SUBSETS, k)
    total = comb(m, k)

    if total <= _ENUMERATE_LIMIT:
        family = [s for s in combinations(range(m), k)
                  if dist is None or _within_diameter(s, dist, max_diameter)]
        if not family:
            raise DomainError("no admissible subsets")
        if count >= len(family):
            return SubsetFamily(k, m, tuple(family), exhausted=count > len(family))
        pick = np.sort(rng.choice(len(family), size=count, replace=False))
        return SubsetFamily(k, m, tuple(family[i] for i in pick))

    seen = {}
    attempts = 0
    max_attempts = 1000 * count
    while len(seen) < count:
        attempts += 1
        if attempts > max_attempts:
            raise DomainError(
                f"found only {len(seen)} admissible subsets after {max_attempts} draws"
            )
        s = tuple(sorted(int(j) for j in rng.choice(m, size=k, replace=False)))
        if s in seen:
            continue
        if dist is not None and not _within_diameter(s, dist, max_diameter):
            continue
        seen[s] = None
    return SubsetFamily(k, m, tuple(seen))


def subset_maxima(values, family, chunk=64):
    """Row-wise maxima ``Y_D`` for every subset; shape ``(n_rep, len(family))``."""
    idx = family.as_array()
    out = np.empty((values.shape[0], len(idx)))
    for a in range(0, len(idx), chunk):
        out[:, a:a + chunk] = values[:, idx[a:a + chunk]].max(axis=2)
    return out


def _check_family(matrix, family):
    matrix.require_scale(Scale.GUMBEL)
    if matrix.n_rep < 2:
        raise DataError("need at least two replicates")
    idx = family.as_array()
    if idx.min() < 0 or idx.max() >= matrix.m:
        raise DomainError("subset index out of range")


def _standardise(y_max, k):
    mu_hat = location_mle(y_max, axis=0)
    mu = np.clip(mu_hat, 0.0, np.log(k))
    return y_max - mu, mu_hat, mu


def pool_z(matrix, family):
    """Pool ``Z_D = Y_D - mu_D`` over replicates and subsets.

    Returns
    -------
    pooled : ndarray
        Length ``n_rep * len(family)``, ordered by subset then replicate.
    per_subset : tuple of SubsetStats
    """
    _check_family(matrix, family)
    z, mu_hat, mu = _standardise(subset_maxima(matrix.values, family), family.k)
    n = matrix.n_rep
    stats = tuple(
        SubsetStats(s, LocationEstimate(float(a), float(b), family.k, n))
        for s, a, b in zip(family.subsets, mu_hat, mu)
    )
    return z.T.ravel(), stats


def _check_grid(p_grid):
    p = np.asarray(p_grid, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise DomainError("p_grid must be a non-empty 1-d sequence")
    if np.any(~((p > 0) & (p < 1))) or np.any(np.diff(p) <= 0):
        raise DomainError("p_grid must be strictly increasing inside (0, 1)")
    return p


def _diff(pooled_sorted, q, p):
    return np.searchsorted(pooled_sorted, q, side="right") / pooled_sorted.size - p


def pp_curve(pooled, p_grid=DEFAULT_P_GRID):
    """Right-continuous ECDF of ``pooled`` at Gumbel quantiles, minus ``p``."""
    pooled = np.asarray(pooled, dtype=float).ravel()
    if pooled.size == 0:
        raise DomainError("pooled sample is empty")
    p = _check_grid(p_grid)
    diff = _diff(np.sort(pooled), gumbel_quantile(p), p)
    return PPCurve(p, diff, int(pooled.size))


def _bootstrap_curves(y_max, k, p, n_boot, seed, n_jobs):
    n = y_max.shape[0]
    q = gumbel_quantile(p)

    def block(start, stop):
        out = np.empty((stop - start, p.size))
        for row, b in enumerate(range(start, stop)):
            rows = _rng.substream(seed, _rng.BOOTSTRAP, k, b).integers(0, n, size=n)
            z, _, _ = _standardise(y_max[rows], k)
            out[row] = _diff(np.sort(z, axis=None), q, p)
        return out

    return np.vstack(_rng.chunked_map(block, n_boot, n_jobs, chunk=16))


def _percentile_band(curves, level):
    tail = (1 - level) / 2
    lo, hi = np.quantile(curves, [tail, 1 - tail], axis=0)
    return lo, hi


def bootstrap_band(matrix, family, p_grid=DEFAULT_P_GRID, n_boot=DEFAULT_N_BOOT,
                   level=DEFAULT_LEVEL, seed=0, n_jobs=1):
    """Pointwise percentile band for the P-P difference curve.

    Each iteration resamples whole replicates (rows) with replacement, keeps
    the subset family fixed and re-estimates every ``mu_D`` before pooling.
    Iteration ``b`` uses the substream keyed by ``(seed, k, b)``.
    """
    _check_family(matrix, family)
    if n_boot < 2:
        raise DomainError("n_boot must be >= 2")
    if not 0 < level < 1:
        raise DomainError("level must lie in (0, 1)")
    p = _check_grid(p_grid)
    y_max = subset_maxima(matrix.values, family)
    curves = _bootstrap_curves(y_max, family.k, p, int(n_boot), seed, n_jobs)
    return _percentile_band(curves, level)


def run_diagnostic(matrix, k, count=DEFAULT_COUNT, n_boot=DEFAULT_N_BOOT,
                   level=DEFAULT_LEVEL, seed=0, max_diameter=None,
                   p_grid=DEFAULT_P_GRID, n_jobs=1):
    """Full test for one subset size ``k``.

    ``reject`` is true when the band excludes zero at any grid point.
    """
    family = sample_subsets(matrix.m, k, count, seed, max_diameter, matrix.grid)
    pooled, stats = pool_z(matrix, family)
    curve = pp_curve(pooled, p_grid)
    lo, hi = bootstrap_band(matrix, family, curve.p_grid, n_boot, level, seed, n_jobs)
    curve = PPCurve(curve.p_grid, curve.diff, curve.n_pooled, lo, hi, int(n_boot), level)
    reject = bool(np.any((lo > 0) | (hi < 0)))
    return DiagnosticResult(k, curve, stats, reject, float(np.abs(curve.diff).max()), family)
