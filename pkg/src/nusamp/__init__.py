"""Reachability and observability of SISO systems under nonuniform sampling.

The package decides whether a minimal continuous-time SISO realization stays
jointly n-reachable and n-observable when sampled at freely chosen instants,
factors the decision determinant into its multiplicity, weighting and
mode-matrix parts, and cross-validates every verdict against a direct rank
test on the sampled input matrix.
"""

from .criterion import (
    ControllabilityVerdict,
    CriterionReport,
    SamplingSchedule,
    ShiftedIntervals,
    controllability_verdict,
    factor_n1,
    factor_n2,
    full_determinant,
    joint_verdict,
    mode_matrix,
    schedule_conditioning,
    shifted_intervals,
)
from .errors import (
    AnalysisError,
    ConvergenceError,
    DimensionError,
    InfeasibleError,
    InsufficientScheduleError,
    MinimalityError,
    NotApplicableError,
    NumericRangeError,
    SingularScheduleError,
    SystemDocumentError,
    UnsupportedOrderError,
)
from .experiments import (
    CaseLabel,
    Trajectory,
    classify_case,
    deadbeat_inputs,
    reconstruct_state,
    simulate_impulse,
    simulate_zoh,
    zoh_input_matrix,
)
from .numerics import (
    RangeCheck,
    RankResult,
    eig_clustered,
    expm,
    in_range,
    numeric_rank,
)
from .oracle import (
    OracleReport,
    ReachabilityMatrixResult,
    controllable_direct,
    cross_validate,
    observable_direct,
    reachability_matrix,
    reachable_direct,
)
from .scheduler import (
    ForbiddenSet,
    ScheduleSearchSpec,
    UniformValidation,
    forbidden_instants_order2,
    suggest_schedule,
    validate_uniform,
)
from .system_model import (
    MinimalityReport,
    ModalDecomposition,
    ModeSet,
    Realization,
    check_minimal,
    check_y0_components,
    eval_mode,
    impulse_response,
    modal_decompose,
    mode_set,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisError",
    "CaseLabel",
    "ControllabilityVerdict",
    "ConvergenceError",
    "CriterionReport",
    "DimensionError",
    "ForbiddenSet",
    "InfeasibleError",
    "InsufficientScheduleError",
    "MinimalityError",
    "MinimalityReport",
    "ModalDecomposition",
    "ModeSet",
    "NotApplicableError",
    "NumericRangeError",
    "OracleReport",
    "RangeCheck",
    "RankResult",
    "ReachabilityMatrixResult",
    "Realization",
    "SamplingSchedule",
    "ScheduleSearchSpec",
    "ShiftedIntervals",
    "SingularScheduleError",
    "SystemDocumentError",
    "Trajectory",
    "UniformValidation",
    "UnsupportedOrderError",
    "check_minimal",
    "check_y0_components",
    "classify_case",
    "controllability_verdict",
    "controllable_direct",
    "cross_validate",
    "deadbeat_inputs",
    "eig_clustered",
    "eval_mode",
    "expm",
    "factor_n1",
    "factor_n2",
    "forbidden_instants_order2",
    "full_determinant",
    "impulse_response",
    "in_range",
    "joint_verdict",
    "modal_decompose",
    "mode_matrix",
    "mode_set",
    "numeric_rank",
    "observable_direct",
    "reachability_matrix",
    "reachable_direct",
    "reconstruct_state",
    "schedule_conditioning",
    "shifted_intervals",
    "simulate_impulse",
    "simulate_zoh",
    "suggest_schedule",
    "validate_uniform",
    "zoh_input_matrix",
]
