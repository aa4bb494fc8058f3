"""Distribution-free hypothesis tests for the regression function of binary
classification, based on conditional kernel mean embeddings."""

from .datagen import MixtureParams, MixtureRegression, candidate, sample_dataset, true_regression
from .embedding import (
    GVec,
    VvktModel,
    eval_vvkt,
    fit_vvkt,
    g_distance_sq,
    reference_variable,
    theoretical_mean_map,
)
from .estimators import KnnEstimator, ProbEstimator, knn_predict, pet_mean_map
from .harness import CalibrationReport, GridSpec, calibrate_type1, consistency_curve, grid_experiment
from .kernels import KernelSpec, eval_kernel, gram_matrix, naive_output_kernel
from .resampling import (
    Estimator,
    LabeledSample,
    TestConfig,
    TestOutcome,
    rank_with_ties,
    resample_labels,
    run_test,
)

__version__ = "0.1.0"
