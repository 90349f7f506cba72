"""Intrinsic dimension estimation from nearest-neighbor distances.

The main entry point is :func:`run_regularized`, a divergence-penalized
maximum-likelihood estimator. Levina-Bickel, inverse-averaged MLE,
correlation dimension and k-NN regression are provided for comparison.
"""

from .baseline import (
    CorrDimConfig,
    LbConfig,
    correlation_dimension,
    correlation_integral,
    inverse_mle_estimate,
    knn_regression_dimension,
    lb_estimate,
    lb_pointwise,
    lb_pointwise_all,
)
from .datasets import GeneratorSpec, generate, load_csv, save_csv
from .errors import *  # noqa: F401,F403
from .harness import SweepResult, SweepRow, estimate_modes, sweep
from .knn import (
    NeighborTable,
    PointCloud,
    brute_force_neighbor_table,
    build_neighbor_table,
    log_distance_ratios,
    log_distance_ratios_all,
)
from .regularized import (
    RegularizedConfig,
    RegularizedState,
    divergence,
    neighborhood_mean,
    quadratic_coefficients,
    quadratic_update,
    run_regularized,
)
from .report import EstimateReport

__version__ = "0.1.0"
