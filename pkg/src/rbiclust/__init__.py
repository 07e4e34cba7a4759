"""Robust convex biclustering with Huber loss, automatic robustification
parameter selection, and missing-data cross-validation for the penalty."""

from .bicluster import (
    BiclusterLabels,
    FitResult,
    extract_biclusters,
    fit_bicluster,
    objective,
)
from .core import SolverConfig, group_shrink, mad, soft_threshold
from .huber import (
    DegenerateResidualError,
    TauPolicy,
    huber_loss,
    huber_prox,
    solve_tau,
    tau_mad_default,
)
from .metrics import (
    adjusted_rand_index,
    cell_labels,
    rand_index,
    variation_of_information,
)
from .model_selection import CvReport, cv_lambda, make_folds
from .oneway import DifferenceOperator, build_difference_operator, solve_oneway
from .simulate import CheckerboardSpec, NoiseSpec, add_noise, make_checkerboard
from .weights import WeightedEdgeList, default_weight_params, knn_huber_weights

__all__ = [
    "BiclusterLabels",
    "CheckerboardSpec",
    "CvReport",
    "DegenerateResidualError",
    "DifferenceOperator",
    "FitResult",
    "NoiseSpec",
    "SolverConfig",
    "TauPolicy",
    "WeightedEdgeList",
    "add_noise",
    "adjusted_rand_index",
    "build_difference_operator",
    "cell_labels",
    "cv_lambda",
    "default_weight_params",
    "extract_biclusters",
    "fit_bicluster",
    "group_shrink",
    "huber_loss",
    "huber_prox",
    "knn_huber_weights",
    "mad",
    "make_checkerboard",
    "make_folds",
    "objective",
    "rand_index",
    "soft_threshold",
    "solve_oneway",
    "solve_tau",
    "tau_mad_default",
    "variation_of_information",
]

__version__ = "0.1.0"
