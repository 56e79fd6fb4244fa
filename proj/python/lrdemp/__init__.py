"""Long-range dependent Gaussian subordination toolkit.

Exact fractional-Gaussian-noise simulation, Hermite-expansion profiles and
weighted sequential empirical-process statistics, backed by the C++ core.
"""

__version__ = "0.1.0"

from ._core import (  # noqa: F401
    CovarianceModel,
    EmbeddingError,
    GaussianPath,
    HypothesisError,
    RankUndetectedError,
    SubordinatedSample,
    SubordinationFunction,
    chaining_depth,
    circulant_spectrum,
    fgn_covariance,
    generate_path,
    hermite_coefficient,
    hermite_eval,
    hermite_rank,
    ks_distance,
    ks_distance_two_sample,
    lambda_majorant,
    marginal_cdf,
    mix_seed,
    moment_estimate,
    normalization_dN,
    run_limit_experiment,
    run_reduction_experiment,
    sequential_empirical,
    slope_fit,
    subordinate,
    weighted_coefficient_sup,
)

__all__ = [
    "CovarianceModel",
    "EmbeddingError",
    "GaussianPath",
    "HypothesisError",
    "RankUndetectedError",
    "SubordinatedSample",
    "SubordinationFunction",
    "chaining_depth",
    "circulant_spectrum",
    "fgn_covariance",
    "generate_path",
    "hermite_coefficient",
    "hermite_eval",
    "hermite_rank",
    "ks_distance",
    "ks_distance_two_sample",
    "lambda_majorant",
    "marginal_cdf",
    "mix_seed",
    "moment_estimate",
    "normalization_dN",
    "run_limit_experiment",
    "run_reduction_experiment",
    "sequential_empirical",
    "slope_fit",
    "subordinate",
    "weighted_coefficient_sup",
]
