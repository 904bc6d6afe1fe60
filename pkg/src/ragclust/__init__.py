"""Random annulus graphs on the unit circle.

Exact global clustering coefficients via geometric triangle counting, the
asymptotic constants of its limit theorem, and reproducible CLT experiments.
"""
__version__ = "0.1.0"

from ._backend import BACKEND
from .counting import (
    Arc,
    ArcSet,
    GraphCounts,
    brute_force_counts,
    count_graph,
    count_in_arcs,
    neighbor_arcs,
)
from .exceptions import (
    CapExceeded,
    EmptySample,
    InvalidParams,
    NonpositiveSigma,
    RagError,
    RegimeViolation,
    TooManyExclusions,
)
from .harness import (
    CltSummary,
    ExperimentRecord,
    ExperimentSpec,
    run_clt_experiment,
    run_convergence_experiment,
    run_replicate,
    run_sigma_scaling,
)
from .model import (
    AnnulusParams,
    PositionSet,
    RngSeed,
    build_adjacency,
    circle_distance,
    edge_indicator,
    sample_positions,
)
from .stats import (
    KernelParams,
    SigmaEstimate,
    asymptotic_limit,
    clustering_coefficient,
    kernel_h,
    ks_distance,
    mean_h_conditional,
    normal_cdf,
    sigma2_cubature,
    sigma2_monte_carlo,
    standardized_statistic,
)
