"""Conflict and adaptable list colouring of multigraphs without 3- or
4-cycles: the wasteful colouring procedure, its recurrence machinery, a
resampling finisher, adversarial instance constructions, and the
exhaustive oracle the tests trust."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .finisher import (
    ReedCondition,
    SearchBudgetError,
    brute_force,
    check_reed,
    resample_colouring,
)
from .graph import (
    Colouring,
    Constraint,
    ListAssignment,
    MultiGraph,
    StructuralError,
    copy_lists,
    t_count,
    t_total,
    verify_colouring,
)
from .instances import (
    BlowupTrace,
    GenerationError,
    InstanceBundle,
    InstanceFormatError,
    ParameterError,
    ResourceBudgetError,
    adaptable_lift,
    blowup,
    blowup_iterate,
    edge_colour_labels,
    f_alpha,
    gen_example1,
    gen_high_girth_regular,
    read_instance,
    reduce_k_colouring,
    write_instance,
)
from .procedure import (
    MAX_ITERS,
    READY,
    STATS_HEADER,
    STUCK,
    CompiledInstance,
    InfeasibleInstanceError,
    IterationStats,
    ProcedureAbort,
    ProcedureState,
    PViolationError,
    keep_vc,
    measure_t_prime,
    prune_bad_colours,
    run_iteration,
    run_procedure,
    stats_csv,
    stats_rows,
)
from .trajectory import (
    LemmaReport,
    TheoryParams,
    Trajectory,
    TrajectoryBreakdownError,
    TrajectoryRow,
    check_regime,
    compute_params,
    i_hat,
    keep_i,
    keep_floor,
    keep_ceiling,
    run_trajectory,
    run_trajectory_log,
    step,
    step_primed,
    trajectory_csv,
    verify_lemmas,
    verify_lemmas_log,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    # graph
    "MultiGraph",
    "Constraint",
    "StructuralError",
    "Colouring",
    "ListAssignment",
    "t_count",
    "t_total",
    "verify_colouring",
    "copy_lists",
    # instances
    "InstanceBundle",
    "BlowupTrace",
    "ParameterError",
    "GenerationError",
    "InstanceFormatError",
    "ResourceBudgetError",
    "gen_example1",
    "blowup",
    "blowup_iterate",
    "f_alpha",
    "reduce_k_colouring",
    "adaptable_lift",
    "edge_colour_labels",
    "gen_high_girth_regular",
    "read_instance",
    "write_instance",
    # trajectory
    "TheoryParams",
    "TrajectoryRow",
    "Trajectory",
    "TrajectoryBreakdownError",
    "LemmaReport",
    "compute_params",
    "keep_i",
    "i_hat",
    "keep_floor",
    "keep_ceiling",
    "step",
    "step_primed",
    "run_trajectory",
    "run_trajectory_log",
    "trajectory_csv",
    "check_regime",
    "verify_lemmas",
    "verify_lemmas_log",
    # procedure
    "ProcedureState",
    "IterationStats",
    "CompiledInstance",
    "ProcedureAbort",
    "PViolationError",
    "InfeasibleInstanceError",
    "prune_bad_colours",
    "keep_vc",
    "run_iteration",
    "measure_t_prime",
    "run_procedure",
    "stats_csv",
    "stats_rows",
    "STATS_HEADER",
    "READY",
    "STUCK",
    "MAX_ITERS",
    # finisher
    "ReedCondition",
    "SearchBudgetError",
    "check_reed",
    "resample_colouring",
    "brute_force",
]
