"""Planted clustering and submatrix localization at desk scale: instance
generators, the four recovery-algorithm tiers (exhaustive MLE, convexified
MLE, counting, thresholding), theorem-condition checkers, and a seeded Monte
Carlo harness for phase-diagram sweeps."""

from .core import (
    BiClusterAssignment,
    ClusterAssignment,
    Graph,
    NoiseKind,
    PlantedParams,
    RealMatrix,
    SubmatrixParams,
    assignment_to_cluster_matrix,
    assignments_equal_up_to_relabeling,
    bicluster_to_matrix,
    flip_graph,
)
from .exact import (
    EnumerationBudgetError,
    MleResult,
    bicluster_space_size,
    cluster_space_size,
    enumerate_cluster_assignments,
    mle_clustering,
    mle_submatrix,
)
from .gen import (
    ModelPreset,
    derive_seed,
    preset_params,
    sample_assignment,
    sample_bicluster_assignment,
    sample_planted_graph,
    sample_submatrix_instance,
)
from .harness import (
    Algorithm,
    ExperimentReport,
    Model,
    SweepConfig,
    TrialConfig,
    run_sweep,
    run_trials,
    wilson_interval,
)
from .regimes import (
    ConditionConstants,
    ConditionReport,
    RegimeLabel,
    asymptotic_regime_clustering,
    asymptotic_regime_submatrix,
    bernoulli_kl,
    check_cvx_clustering,
    check_cvx_converse_clustering,
    check_impossible_clustering,
    check_mle_clustering,
    check_simple_clustering,
    check_simple_converse_clustering,
    check_submatrix_conditions,
)
from .sdp import (
    ConvexSolution,
    SolverOptions,
    project_box_sum,
    project_trace_ball,
    round_and_certify,
    solve_convex,
)
from .simple import (
    CountingThresholds,
    Inconsistent,
    ThresholdingThresholds,
    common_neighbors,
    counting_algorithm,
    elementwise_thresholding,
    submatrix_thresholding,
)
from .cli import cli

__version__ = "0.1.0"
