"""Leave-one-out elpd for the conjugate normal model and the variance of its sampling distribution."""

from .dgp import DgpSpec, TrueMoments, reference_dgps, sample, true_moments, true_products
from .harness import (
    BootstrapSummary,
    SimulationConfig,
    SimulationReport,
    bayesian_bootstrap,
    emit_report,
    load_config,
    run_experiment,
)
from .moments import MomentProducts, RawMoments, estimate_moment_products, raw_moments
from .normal_model import (
    ElpdCoefficients,
    ModelConfig,
    PointwiseElpd,
    coefficients,
    log_predictive_density,
    loo_pointwise_elpd,
)
from .variance import (
    FoldMoments,
    VarianceEstimate,
    expected_naive,
    fold_moments,
    naive_variance,
    total_variance,
    unbiased_variance,
)

__all__ = [
    "DgpSpec",
    "TrueMoments",
    "reference_dgps",
    "sample",
    "true_moments",
    "true_products",
    "BootstrapSummary",
    "SimulationConfig",
    "SimulationReport",
    "bayesian_bootstrap",
    "emit_report",
    "load_config",
    "run_experiment",
    "MomentProducts",
    "RawMoments",
    "estimate_moment_products",
    "raw_moments",
    "ElpdCoefficients",
    "ModelConfig",
    "PointwiseElpd",
    "coefficients",
    "log_predictive_density",
    "loo_pointwise_elpd",
    "FoldMoments",
    "VarianceEstimate",
    "expected_naive",
    "fold_moments",
    "naive_variance",
    "total_variance",
    "unbiased_variance",
]

__version__ = "0.1.0"
