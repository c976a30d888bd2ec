"""Layer-partitioned scheduling of square matrix multiplication.

Splitting the work into per-processor layers (matching column/row slices
of the two operands) makes any complete assignment communication-optimal;
the solvers here then balance the per-node column counts to minimise the
finishing time on heterogeneous star networks (closed forms) and mesh
quadrants (an LP relaxation plus integer repair and local search).
"""

from .baselines import (
    Rect,
    RectPartition,
    even_col_schedule,
    pipeline_schedule,
    rect_comm_volume,
    rect_lower_bound,
    summa_cost,
)
from .experiment import ExperimentConfig, ExperimentReport, run_experiment, write_csv
from .lp import (
    DEFAULT_BACKEND,
    LinearProgram,
    LpSolution,
    LpStatus,
    NumericalFailure,
    available_backends,
    solve_lp,
)
from .mesh import (
    InfeasibleProblem,
    MeshProblem,
    MeshResult,
    build_relaxation,
    extract_schedule,
    fix_integer_schedule,
    neighbor_search,
    resolve_fixed_cols,
    solve_heuristic,
    solve_pmft,
)
from .model import (
    Link,
    MalformedNetwork,
    NetworkKind,
    NetworkModel,
    Processor,
    Schedule,
    SchedulerError,
    Task,
    Timing,
    compute_load,
    full_mesh,
    lbp_source_volume,
    load_network,
    network_from_json,
    network_to_json,
    per_processor_volume,
    quadrant_mesh,
    save_network,
    star_network,
    validate_schedule,
)
from .simulate import evaluate_schedule, gen_network
from .star import (
    InfeasibleMode,
    StarMode,
    StarSolution,
    integerize_star,
    solve_star,
    star_system,
    verify_star,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_BACKEND",
    "ExperimentConfig",
    "ExperimentReport",
    "InfeasibleMode",
    "InfeasibleProblem",
    "LinearProgram",
    "Link",
    "LpSolution",
    "LpStatus",
    "MalformedNetwork",
    "MeshProblem",
    "MeshResult",
    "NetworkKind",
    "NetworkModel",
    "NumericalFailure",
    "Processor",
    "Rect",
    "RectPartition",
    "Schedule",
    "SchedulerError",
    "StarMode",
    "StarSolution",
    "Task",
    "Timing",
    "available_backends",
    "build_relaxation",
    "compute_load",
    "evaluate_schedule",
    "even_col_schedule",
    "extract_schedule",
    "fix_integer_schedule",
    "full_mesh",
    "gen_network",
    "integerize_star",
    "lbp_source_volume",
    "load_network",
    "neighbor_search",
    "network_from_json",
    "network_to_json",
    "per_processor_volume",
    "pipeline_schedule",
    "quadrant_mesh",
    "rect_comm_volume",
    "rect_lower_bound",
    "resolve_fixed_cols",
    "run_experiment",
    "save_network",
    "solve_heuristic",
    "solve_lp",
    "solve_pmft",
    "solve_star",
    "star_network",
    "star_system",
    "summa_cost",
    "validate_schedule",
    "verify_star",
    "write_csv",
]
