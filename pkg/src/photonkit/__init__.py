"""Photon-number statistics, multiphoton subtraction, and quadrature inference."""

from .errors import (
    BinningError,
    CampaignError,
    ConvergenceError,
    DomainError,
    ImpossibleSubtractionError,
    OrderRangeError,
    PhotonKitError,
    PoolExhaustedError,
    SubVacuumVarianceError,
    TruncationError,
    UnsupportedModelError,
)
from .experiment import (
    CampaignConfig,
    CampaignMode,
    CampaignResult,
    ModelComparison,
    compare_models,
    run_campaign,
)
from .inference import (
    FitMethod,
    FitResult,
    chi2_test,
    fidelity,
    fisher_errors,
    fit_hierarchy2,
    method_of_moments,
    mle_fit,
    moments_fit,
)
from .photon_stats import (
    CorrelationReport,
    ModelKind,
    PhotonModel,
    apply_loss,
    autocorrelation,
    fock_cutoff,
    moments,
    pgf_derivative,
    pgf_eval,
    pmf,
    pmf_values,
)
from .quadrature import (
    QuadratureMoments,
    QuadratureSample,
    hermite_function,
    load_samples,
    quadrature_cdf,
    quadrature_moments,
    quadrature_pdf,
    quadrature_quantiles,
    sample_counts,
    sample_for_counts,
    sample_quadratures,
    save_samples,
)
from .subtraction import (
    SubtractionRecord,
    autocorr_from_means,
    conditional_autocorr,
    mc_subtract,
    subtract_analytic,
    subtract_finite_p,
)

__version__ = "0.1.0"

__all__ = [
    "BinningError",
    "CampaignConfig",
    "CampaignError",
    "CampaignMode",
    "CampaignResult",
    "ConvergenceError",
    "CorrelationReport",
    "DomainError",
    "FitMethod",
    "FitResult",
    "ImpossibleSubtractionError",
    "ModelComparison",
    "ModelKind",
    "OrderRangeError",
    "PhotonKitError",
    "PhotonModel",
    "PoolExhaustedError",
    "QuadratureMoments",
    "QuadratureSample",
    "SubVacuumVarianceError",
    "SubtractionRecord",
    "TruncationError",
    "UnsupportedModelError",
    "apply_loss",
    "autocorr_from_means",
    "autocorrelation",
    "chi2_test",
    "compare_models",
    "conditional_autocorr",
    "fidelity",
    "fisher_errors",
    "fit_hierarchy2",
    "fock_cutoff",
    "hermite_function",
    "load_samples",
    "mc_subtract",
    "method_of_moments",
    "mle_fit",
    "moments",
    "moments_fit",
    "pgf_derivative",
    "pgf_eval",
    "pmf",
    "pmf_values",
    "quadrature_cdf",
    "quadrature_moments",
    "quadrature_pdf",
    "quadrature_quantiles",
    "run_campaign",
    "sample_counts",
    "sample_for_counts",
    "sample_quadratures",
    "save_samples",
    "subtract_analytic",
    "subtract_finite_p",
]
