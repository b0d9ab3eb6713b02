"""Network sampling laboratory.

Generate synthetic weighted social networks with controlled group share,
activity ratio and homophily; simulate respondent-driven sampling with
differential recruitment and reporting errors; estimate the hidden group
proportion with recruitment-based and ego-report-based estimators; and
quantify uncertainty with chain bootstrap confidence intervals.
"""

from ._jit import NUMBA_ENABLED
from .bootstrap import (
    BootstrapConfig,
    BootstrapResult,
    ConfidenceInterval,
    bootstrap_ci,
    bootstrap_replicates,
    coverage,
    percentile_ci,
)
from .errors import (
    BootstrapError,
    CalibrationError,
    RdsLabError,
    TuningError,
    ValidationError,
)
from .estimate import (
    EstimateSet,
    ego_matrix,
    estimate_all,
    mean_degree_estimate,
    observed_matrix,
    rdsi,
    rdsi_ego,
    rdsi_from_parts,
    rdsii,
    sample_proportion,
)
from .experiment import CellParams, ExperimentSpec, run_experiment
from .metrics import MetricRow, MetricSummary, compute_metrics, compute_p_best
from .netcore import (
    Group,
    Network,
    NetworkStats,
    RecruitmentMatrix,
    compute_stats,
    giant_component,
)
from .netgen import (
    DEFAULT_P_DELTA,
    KoskkParams,
    TuneTargets,
    assign_groups,
    calibrate_p_delta,
    koskk_generate,
    tune_activity_ratio,
    tune_homophily,
    tune_network,
)
from .rdssim import (
    RdsConfig,
    RdsSample,
    Respondent,
    apply_report_errors,
    draw_seeds,
    run_rds,
)

__version__ = "0.1.0"

__all__ = [
    "NUMBA_ENABLED",
    "__version__",
    # errors
    "RdsLabError",
    "ValidationError",
    "TuningError",
    "CalibrationError",
    "BootstrapError",
    # network model
    "Group",
    "Network",
    "NetworkStats",
    "RecruitmentMatrix",
    "compute_stats",
    "giant_component",
    # generation and tuning
    "KoskkParams",
    "TuneTargets",
    "DEFAULT_P_DELTA",
    "koskk_generate",
    "calibrate_p_delta",
    "assign_groups",
    "tune_activity_ratio",
    "tune_homophily",
    "tune_network",
    # sampling
    "RdsConfig",
    "RdsSample",
    "Respondent",
    "run_rds",
    "draw_seeds",
    "apply_report_errors",
    # estimation
    "EstimateSet",
    "estimate_all",
    "sample_proportion",
    "observed_matrix",
    "ego_matrix",
    "mean_degree_estimate",
    "rdsi",
    "rdsii",
    "rdsi_ego",
    "rdsi_from_parts",
    # bootstrap
    "BootstrapConfig",
    "BootstrapResult",
    "ConfidenceInterval",
    "bootstrap_replicates",
    "bootstrap_ci",
    "percentile_ci",
    "coverage",
    # metrics and harness
    "MetricRow",
    "MetricSummary",
    "compute_metrics",
    "compute_p_best",
    "CellParams",
    "ExperimentSpec",
    "run_experiment",
]
