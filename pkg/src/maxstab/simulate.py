"""Benchmark generators: Smith storm process, multivariate logistic, Gaussian copula.

All generators return a :class:`~maxstab.data.ReplicateMatrix` on standard
Gumbel margins. Replicate ``i`` draws only from the substream keyed by
``(seed, model tag, i)``, so output is identical for any ``n_jobs``.
"""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.special import log_ndtr

from . import _rng
from .data import ReplicateMatrix, Scale, SiteGrid
from .errors import DomainError, NumericError

DEFAULT_ALPHA = 0.7
DEFAULT_LAMBDA = 1 / 0.7


class Model(str, Enum):
    SMITH = "smith"
    LOGISTIC = "logistic"
    GAUSS = "gauss"


@dataclass
class SimConfig:
    model: Model
    n_rep: int = 1000
    seed: int = 0
    alpha: float = DEFAULT_ALPHA
    omega: np.ndarray = field(default_factory=lambda: np.eye(2))
    lam: float = DEFAULT_LAMBDA
    corr_param: str = "range"
    buffer: float | None = None

    def __post_init__(self):
        self.model = Model(self.model)
        self.omega = np.asarray(self.omega, dtype=float)
        if int(self.n_rep) != self.n_rep or self.n_rep < 1:
            raise DomainError("n_rep must be a positive integer")
        self.n_rep = int(self.n_rep)
        _rng.check_seed(self.seed)


def _as_grid(grid):
    if isinstance(grid, SiteGrid):
        return grid
    return SiteGrid(grid, allow_coincident=True)


def cholesky_spd(matrix, max_jitter=1e-10):
    """Lower Cholesky factor of a symmetric matrix.

    If plain factorisation fails, diagonal jitter is added in decades up to
    ``max_jitter`` before giving up.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("matrix must be square")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise DomainError("matrix must be symmetric")
    jitter = 0.0
    eye = np.eye(a.shape[0])
    while True:
        try:
            return np.linalg.cholesky(a + jitter * eye)
        except np.linalg.LinAlgError:
            jitter = 1e-14 if jitter == 0 else jitter * 10
            if jitter > max_jitter * (1 + 1e-9):
                raise NumericError("correlation not positive definite") from None


def positive_stable(alpha, uniform, exponential):
    """Kanter's transform of ``(pi * U, E)`` to a positive stable variate.

    The result ``S`` satisfies ``E[exp(-t S)] = exp(-t**alpha)`` for
    ``0 < alpha < 1``. Vectorised over ``uniform`` and ``exponential``.
    """
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1); alpha = 1 is degenerate at S = 1")
    theta = np.pi * np.asarray(uniform, dtype=float)
    e = np.asarray(exponential, dtype=float)
    log_a = (
        (np.log(np.sin(alpha * theta)) - np.log(np.sin(theta))) / (1 - alpha)
        + np.log(np.sin((1 - alpha) * theta))
        - np.log(np.sin(alpha * theta))
    )
    out = np.exp((1 - alpha) / alpha * (log_a - np.log(e)))
    return float(out) if out.ndim == 0 else out


def simulate_logistic(m, alpha, n_rep, seed, n_jobs=1):
    """Symmetric logistic multivariate extreme value distribution.

    Unit Frechet margins ``Z_j = (S / E_j)**alpha`` with joint CDF
    ``exp{-(sum z_j**(-1/alpha))**alpha}``, returned as ``log Z``.
    """
    if int(m) != m or m < 1:
        raise DomainError("m must be a positive integer")
    if not 0 < alpha <= 1:
        raise DomainError("alpha must lie in (0, 1]")
    m = int(m)

    def block(start, stop):
        out = np.empty((stop - start, m))
        for row, i in enumerate(range(start, stop)):
            rng = _rng.substream(seed, _rng.LOGISTIC, i)
            u = rng.random()
            e0 = rng.standard_exponential()
            e = rng.standard_exponential(m)
            log_s = 0.0 if alpha == 1 else np.log(positive_stable(alpha, u, e0))
            out[row] = alpha * (log_s - np.log(e))
        return out

    values = np.vstack(_rng.chunked_map(block, int(n_rep), n_jobs))
    return ReplicateMatrix(values, Scale.GUMBEL)


def correlation_matrix(grid, lam, corr_param="range"):
    """Exponential correlation ``exp(-lam h)`` (rate) or ``exp(-h / lam)`` (range)."""
    if not lam > 0:
        raise DomainError("lambda must be positive")
    h = _as_grid(grid).distances()
    if corr_param == "rate":
        return np.exp(-lam * h)
    if corr_param == "range":
        return np.exp(-h / lam)
    raise DomainError(f"corr_param must be 'rate' or 'range', got {corr_param!r}")


def simulate_gauss_copula(grid, lam, n_rep, seed, corr_param="range", n_jobs=1):
    """Gaussian field with exponential correlation, transformed to Gumbel margins."""
    grid = _as_grid(grid)
    chol = cholesky_spd(correlation_matrix(grid, lam, corr_param))
    m = grid.m

    def block(start, stop):
        z = np.empty((stop - start, m))
        for row, i in enumerate(range(start, stop)):
            z[row] = _rng.substream(seed, _rng.GAUSS, i).standard_normal(m)
        g = z @ chol.T
        # -log(-log Phi(g)), kept accurate in the upper tail
        return -np.log(-log_ndtr(g))

    values = np.vstack(_rng.chunked_map(block, int(n_rep), n_jobs))
    return ReplicateMatrix(values, Scale.GUMBEL, grid)


def _check_omega(omega):
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (2, 2):
        raise DomainError("omega must be 2 x 2")
    if not np.allclose(omega, omega.T):
        raise DomainError("omega must be symmetric")
    try:
        np.linalg.cholesky(omega)
    except np.linalg.LinAlgError:
        raise DomainError("omega must be positive definite") from None
    return omega


def smith_buffer(omega):
    """Default window extension: four kernel standard deviations."""
    return 4.0 * float(np.sqrt(np.linalg.eigvalsh(_check_omega(omega)).max()))


def _smith_replicate(rng, sites, lo, width, area, omega_inv, peak, batch=32):
    m = sites.shape[0]
    zmax = np.zeros(m)
    gamma = 0.0
    while True:
        arrivals = gamma + np.cumsum(rng.standard_exponential(batch))
        gamma = arrivals[-1]
        zeta = area / arrivals
        centres = lo + width * rng.random((batch, 2))
        d = sites[None, :, :] - centres[:, None, :]
        q = np.einsum("bmi,ij,bmj->bm", d, omega_inv, d)
        zmax = np.maximum(zmax, (zeta[:, None] * (peak * np.exp(-0.5 * q))).max(axis=0))
        # storms arrive with decreasing zeta; none after this can raise any site
        if zeta[-1] * peak < zmax.min():
            return zmax
        batch = min(batch * 2, 1024)


def simulate_smith(grid, omega, n_rep, seed, buffer=None, n_jobs=1):
    """Smith storm-profile max-stable process on the sites of ``grid``.

    Parameters
    ----------
    grid : SiteGrid or array_like
        Site coordinates. A raw ``(m, 2)`` array skips the distinctness check.
    omega : array_like
        2 x 2 SPD covariance of the Gaussian storm profile.
    n_rep, seed : int
    buffer : float, optional
        Extension of the sites' bounding box on every side; storm centres are
        uniform on the extended window. Defaults to :func:`smith_buffer`.

    Returns
    -------
    ReplicateMatrix
        ``log`` of the unit Frechet field, i.e. Gumbel scale.
    """
    omega = _check_omega(omega)
    if buffer is None:
        buffer = smith_buffer(omega)
    if not buffer > 0:
        raise DomainError("buffer must be positive")
    grid = _as_grid(grid)
    sites = grid.coords
    lo, hi = grid.bounding_box()
    lo = lo - buffer
    width = hi + buffer - lo
    area = float(np.prod(width))
    omega_inv = np.linalg.inv(omega)
    peak = 1.0 / (2 * np.pi * np.sqrt(np.linalg.det(omega)))

    def block(start, stop):
        return np.vstack([
            _smith_replicate(_rng.substream(seed, _rng.SMITH, i), sites, lo, width,
                             area, omega_inv, peak)
            for i in range(start, stop)
        ])

    values = np.log(np.vstack(_rng.chunked_map(block, int(n_rep), n_jobs)))
    return ReplicateMatrix(values, Scale.GUMBEL, grid)


def simulate(config, grid=None, n_jobs=1):
    """Dispatch on ``config.model``. ``grid`` defaults to the 10 x 10 study grid."""
    if grid is None:
        grid = SiteGrid.regular(10)
    if config.model is Model.SMITH:
        return simulate_smith(grid, config.omega, config.n_rep, config.seed,
                              config.buffer, n_jobs=n_jobs)
    if config.model is Model.LOGISTIC:
        out = simulate_logistic(grid.m, config.alpha, config.n_rep, config.seed, n_jobs=n_jobs)
        return ReplicateMatrix(out.values, Scale.GUMBEL, grid)
    return simulate_gauss_copula(grid, config.lam, config.n_rep, config.seed,
                                 config.corr_param, n_jobs=n_jobs)
