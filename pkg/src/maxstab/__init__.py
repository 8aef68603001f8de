"""Diagnostics for max-stable dependence in spatial extremes."""

__version__ = "0.1.0"

from .data import ReplicateMatrix, Scale, SiteGrid
from .diagnostic import (
    DiagnosticResult,
    PPCurve,
    SubsetFamily,
    bootstrap_band,
    pool_z,
    pp_curve,
    run_diagnostic,
    sample_subsets,
)
from .errors import DataError, DomainError, MaxStabError, NumericError
from .margins import (
    LocationEstimate,
    empirical_to_gumbel,
    fit_gumbel_location,
    frechet_to_gumbel,
    gumbel_cdf,
    gumbel_quantile,
    gumbel_to_frechet,
)
from .simulate import (
    SimConfig,
    cholesky_spd,
    positive_stable,
    simulate_gauss_copula,
    simulate_logistic,
    simulate_smith,
)
from .taildep import EtaEstimate, eta_for_subsets, hill_eta, structure_min, survival_curve
