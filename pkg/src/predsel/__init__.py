"""Linear prediction models under a Gaussian random design: candidate-model
evaluation, greedy selection, prediction intervals post selection, exact
oracle quantities, and Monte Carlo verification of the finite-sample
guarantees."""

from .dgp import (
    ArchParams,
    ARCH_NONSPARSE,
    ARCH_SPARSE,
    Dgp,
    DgpSpec,
    FutureDraw,
    FutureSample,
    GeometricCov,
    TrainingSample,
    build_dgp,
    generate_beta_arch,
    sample_future,
    sample_training,
    scale_means,
    scale_to_snr,
    spec_from_json,
    spec_to_json,
)
from .lsq import FitResult, ModelMask, criterion_value, fit_model, predict_point, rss_for_mask
from .modelsel import (
    GreedyPath,
    ModelCollection,
    greedy_block_path,
    oracle_best,
    select_min,
    select_on_path,
)
from .oracle import (
    ConditionalRegression,
    GaussianLaw,
    McEstimate,
    OracleQuantities,
    chi_sq_cdf,
    conditional_coverage,
    conditional_regression,
    delta_sq_cdf,
    exact_tv_gaussian,
    expected_rho_sq,
    f_ratio_cdf,
    mc_rho_sq,
    oracle_quantities,
)
from .predict import (
    PredictionInterval,
    ThresholdDecision,
    estimated_law,
    infeasible_interval,
    prediction_interval,
    threshold_test,
    two_sided_quantile,
)
from .bounds import (
    BoundSpec,
    GridReport,
    McBoundRow,
    bound,
    bound_value,
    check_inequality_grid,
    default_grid,
    mc_bound_check,
)
from .rng import substream

__version__ = "0.1.0"
