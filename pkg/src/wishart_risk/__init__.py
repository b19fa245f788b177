"""Estimation-noise bias correction for minimum-variance portfolio risk
under compound-Wishart covariance estimators, with the orthogonal
Weingarten calculus it rests on.
"""

from .combinat import (
    CosetType,
    PairPartition,
    Perm2k,
    coset_type,
    delta_product,
    enumerate_pair_partitions,
    is_hyperoctahedral,
    kappa,
    power_trace,
)
from .correction import (
    CorrectionFactor,
    asymptotic_limit,
    bias_factor,
    scale_predicted_risk,
    variance_of_q,
)
from .errors import WishartRiskError
from .estimators import (
    WeightMatrix,
    build_weight_matrix,
    check_noise_condition,
    estimate_covariance,
)
from .ingest import ReturnPanel, read_returns_csv, real_data_risk_study
from .invmoments import (
    haar_moment,
    inv_wishart_mean,
    inv_wishart_moment_general,
    inv_wishart_second_moment,
)
from .portfolio import (
    RiskReport,
    make_risk_report,
    min_variance_weights,
    portfolio_risk,
    q_ratio,
    spd_inverse,
)
from .sampling import (
    CovarianceModel,
    pseudo_inverse,
    random_spd,
    sample_compound_wishart,
    sample_haar_orthogonal,
    symmetric_root,
)
from .simlab import (
    ExperimentConfig,
    TrialRecord,
    export_histogram,
    run_experiment,
    summarize,
)
from .weingarten import (
    BiinvariantFn,
    WeingartenTable,
    sharp_convolve,
    wg_double,
    wg_single,
)

__version__ = "0.1.0"

__all__ = [
    "BiinvariantFn",
    "CorrectionFactor",
    "CosetType",
    "CovarianceModel",
    "ExperimentConfig",
    "PairPartition",
    "Perm2k",
    "ReturnPanel",
    "RiskReport",
    "TrialRecord",
    "WeightMatrix",
    "WeingartenTable",
    "WishartRiskError",
    "asymptotic_limit",
    "bias_factor",
    "build_weight_matrix",
    "check_noise_condition",
    "coset_type",
    "delta_product",
    "enumerate_pair_partitions",
    "estimate_covariance",
    "export_histogram",
    "haar_moment",
    "inv_wishart_mean",
    "inv_wishart_moment_general",
    "inv_wishart_second_moment",
    "is_hyperoctahedral",
    "kappa",
    "make_risk_report",
    "min_variance_weights",
    "portfolio_risk",
    "power_trace",
    "pseudo_inverse",
    "q_ratio",
    "random_spd",
    "read_returns_csv",
    "real_data_risk_study",
    "run_experiment",
    "sample_compound_wishart",
    "sample_haar_orthogonal",
    "scale_predicted_risk",
    "sharp_convolve",
    "spd_inverse",
    "summarize",
    "symmetric_root",
    "variance_of_q",
    "wg_double",
    "wg_single",
]
