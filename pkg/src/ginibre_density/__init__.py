"""Spectral densities of deformed Ginibre matrices: saddle-point predictions
and Monte Carlo verification through log-determinant potentials."""

__version__ = "0.1.0"

from .density import predict_field, rho_eps, rho_limit
from .ensembles import (
    EnsembleSpec,
    NoiseSample,
    build_deformation,
    hermitize,
    random_unitary,
    sample_ginibre,
)
from .grids import DensityField, GridSpec
from .montecarlo import (
    LinearStatistic,
    McConfig,
    RadialBump,
    empirical_density,
    linear_statistic,
    log_potential,
    rate_experiment,
)
from .spectral import (
    BoundaryPolyline,
    DomainVerdict,
    SaddleSolution,
    SpectralMeasure,
    domain_verdict,
    nu_measure,
    solve_x0,
    solve_x_eps,
    stieltjes,
    trace_boundary,
    trace_t1,
    trace_t2,
)

__all__ = [
    "__version__",
    "BoundaryPolyline", "DensityField", "DomainVerdict", "EnsembleSpec",
    "GridSpec", "LinearStatistic", "McConfig", "NoiseSample", "RadialBump",
    "SaddleSolution", "SpectralMeasure",
    "build_deformation", "domain_verdict", "empirical_density", "hermitize",
    "linear_statistic", "log_potential", "nu_measure", "predict_field",
    "random_unitary", "rate_experiment", "rho_eps", "rho_limit",
    "sample_ginibre", "solve_x0", "solve_x_eps", "stieltjes",
    "trace_boundary", "trace_t1", "trace_t2",
]
