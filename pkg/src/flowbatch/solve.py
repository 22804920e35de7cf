"""One entry point per algorithm tag, with preprocessing and validation wired in."""
from __future__ import annotations

import time

from .baselines import OracleConfig, brute_force_oracle, lazy_activation
from .core import (
    INFINITY,
    Infeasible,
    Instance,
    PreconditionError,
    Schedule,
    SolveOutcome,
    validate_schedule,
)
from .dp_arbitrary import solve_arbitrary
from .dp_unit import solve_unit_agreeable, solve_unit_agreeable_subset
from .dp_uniform import solve_uniform_agreeable, solve_uniform_agreeable_subset
from .preprocess import check_agreeable, is_b_capacity_compatible, make_b_capacity_compatible

ALGORITHMS = ("unit-dp", "uniform-dp", "arbitrary-dp", "lazy", "lazy-reverse", "oracle")


def _require_unit(inst: Instance, algo: str) -> None:
    if inst.p != 1:
        raise PreconditionError(f"{algo} needs unit jobs (p = 1), got p = {inst.p}",
                                check="unit_length", fallback="uniform-dp or arbitrary-dp")


def _require_agreeable(inst: Instance, algo: str) -> None:
    if not check_agreeable(inst):
        raise PreconditionError(f"{algo} needs agreeable deadlines: check_agreeable failed",
                                check="check_agreeable")


def _require_full(inst: Instance, algo: str) -> None:
    if inst.target != inst.n:
        raise PreconditionError(f"{algo} completes every job; m < n needs unit-dp, "
                                f"uniform-dp or oracle", check="full_completion",
                                fallback="uniform-dp")


def _unit_dp(inst: Instance, backend: str | None) -> SolveOutcome:
    _require_unit(inst, "unit-dp")
    _require_agreeable(inst, "unit-dp")
    if inst.target < inst.n:
        if is_b_capacity_compatible(inst):
            return solve_unit_agreeable_subset(inst, backend=backend)
        # Release shifting is only value-preserving when every job is
        # completed; for a strict subset the shifted instance can lose the
        # optimum, so overfull inputs go through the release-agnostic DP.
        out = solve_uniform_agreeable_subset(inst, backend=backend)
        out.stats["routed"] = "uniform-dp-subset"
        out.algorithm = "unit-dp-subset"
        return out
    t0 = time.perf_counter()
    pre = make_b_capacity_compatible(inst)
    if pre.infeasible:
        return SolveOutcome(Infeasible(), "unit-dp", INFINITY,
                            {"preprocess": "infeasible", "wall_time": time.perf_counter() - t0},
                            shift_total=pre.shift_total)
    out = solve_unit_agreeable(pre.transformed, backend=backend)
    out.shift_total = pre.shift_total
    if out.feasible:
        out.result = Schedule.from_batches(inst, out.result.batches)
    out.stats["wall_time"] = time.perf_counter() - t0
    return out


def solve(inst: Instance, algo: str, *, backend: str | None = None,
          oracle_config: OracleConfig | None = None, validate: bool = True) -> SolveOutcome:
    """Run ``algo`` on ``inst`` and check the schedule against the original instance.

    Raises :class:`PreconditionError` when ``algo`` does not apply.
    """
    if algo == "unit-dp":
        out = _unit_dp(inst, backend)
    elif algo == "uniform-dp":
        _require_agreeable(inst, algo)
        if inst.target < inst.n:
            out = solve_uniform_agreeable_subset(inst, backend=backend)
        else:
            out = solve_uniform_agreeable(inst, backend=backend)
    elif algo == "arbitrary-dp":
        _require_full(inst, algo)
        out = solve_arbitrary(inst, backend=backend)
    elif algo in ("lazy", "lazy-reverse"):
        _require_unit(inst, algo)
        _require_full(inst, algo)
        out = lazy_activation(inst, reverse=algo == "lazy-reverse")
    elif algo == "oracle":
        out = brute_force_oracle(inst, oracle_config)
    else:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {ALGORITHMS}")
    if validate and out.feasible:
        report = validate_schedule(inst, out.result)
        if not report.ok:
            raise AssertionError(f"{algo} emitted an invalid schedule: {report.violations}")
        out.stats["validated"] = True
    return out


def require(inst: Instance, algo: str) -> None:
    """Raise :class:`PreconditionError` unless ``algo`` applies to ``inst``."""
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {ALGORITHMS}")
    if algo in ("unit-dp", "lazy", "lazy-reverse"):
        _require_unit(inst, algo)
    if algo in ("unit-dp", "uniform-dp"):
        _require_agreeable(inst, algo)
    if algo in ("arbitrary-dp", "lazy", "lazy-reverse"):
        _require_full(inst, algo)


def applicable(inst: Instance, algo: str) -> bool:
    try:
        require(inst, algo)
    except PreconditionError:
        return False
    return True
