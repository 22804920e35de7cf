"""Minimum flow time scheduling of equal-length jobs in capacity-B batches under a batch budget."""
from ._accel import get_backend, set_backend
from .baselines import OracleConfig, OracleLimitError, brute_force_oracle, lazy_activation
from .core import (
    INFINITY,
    Batch,
    Infeasible,
    Instance,
    InstanceError,
    Job,
    PreconditionError,
    Schedule,
    SolveOutcome,
    ValidationReport,
    flow_of_assignment,
    validate_schedule,
)
from .dp_arbitrary import solve_arbitrary
from .dp_unit import solve_unit_agreeable, solve_unit_agreeable_subset
from .dp_uniform import solve_uniform_agreeable, solve_uniform_agreeable_subset
from .pareto import FrontierPoint, sweep
from .preprocess import check_agreeable, make_b_capacity_compatible
from .solve import ALGORITHMS, applicable, solve

__all__ = [
    "ALGORITHMS", "INFINITY", "Batch", "FrontierPoint", "Infeasible", "Instance", "InstanceError",
    "Job", "OracleConfig", "OracleLimitError", "PreconditionError", "Schedule", "SolveOutcome",
    "ValidationReport", "applicable", "brute_force_oracle", "check_agreeable", "flow_of_assignment",
    "get_backend", "lazy_activation", "make_b_capacity_compatible", "set_backend", "solve",
    "solve_arbitrary", "solve_uniform_agreeable", "solve_uniform_agreeable_subset",
    "solve_unit_agreeable", "solve_unit_agreeable_subset", "sweep", "validate_schedule",
]
__version__ = "0.1.0"
