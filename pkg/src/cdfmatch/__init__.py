"""Distribution-matched kernel models.

Train SVR/SVC models on a composite objective, a pointwise error plus a
distance between the model's output CDF and a target CDF, and compare the
result against error-only training.
"""

from .distributions import InputDistribution, Marginal, sample
from .divergence import (
    DISTANCE_KINDS,
    bhattacharyya_distance,
    cdf_to_masses,
    distance,
    kl_divergence,
    l1_cdf_distance,
)
from .ecdf import EmpiricalCdf, ThresholdGrid, ecdf_build, ecdf_eval, make_grid, mc_cdf
from .hpo import OptResult, SearchSpace, TrialRecord, baseline_theta, optimize
from .losses import (
    LossBreakdown,
    LossWeights,
    ObjectiveConfig,
    data_loss,
    evaluate_objective,
    evaluate_objective_classification,
    physics_loss,
)
from .matched import DistributionMatchedSVC, DistributionMatchedSVR
from .metrics import ClassificationReport, ConfusionMatrix, confusion, psnr, report, rmse, ssim
from .rng import RngStream, derive_stream
from .svm import (
    HyperParams,
    Standardizer,
    SvmClassifier,
    SvmRegressor,
    kernel_matrix,
    kernel_value,
    load_model,
    save_model,
)

__all__ = [
    "ClassificationReport",
    "ConfusionMatrix",
    "DISTANCE_KINDS",
    "DistributionMatchedSVC",
    "DistributionMatchedSVR",
    "EmpiricalCdf",
    "HyperParams",
    "InputDistribution",
    "LossBreakdown",
    "LossWeights",
    "Marginal",
    "ObjectiveConfig",
    "OptResult",
    "RngStream",
    "SearchSpace",
    "Standardizer",
    "SvmClassifier",
    "SvmRegressor",
    "ThresholdGrid",
    "TrialRecord",
    "baseline_theta",
    "bhattacharyya_distance",
    "cdf_to_masses",
    "confusion",
    "data_loss",
    "derive_stream",
    "distance",
    "ecdf_build",
    "ecdf_eval",
    "evaluate_objective",
    "evaluate_objective_classification",
    "kernel_matrix",
    "kernel_value",
    "kl_divergence",
    "l1_cdf_distance",
    "load_model",
    "make_grid",
    "mc_cdf",
    "optimize",
    "physics_loss",
    "psnr",
    "report",
    "rmse",
    "sample",
    "save_model",
    "ssim",
]

__version__ = "0.1.0"
