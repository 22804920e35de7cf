"""Lazy Activation and the exhaustive oracle.

The oracle deliberately ignores every structural property the dynamic
programs rely on: it tries every set of batch starts on the integer grid and
solves the job-to-seat assignment exactly.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import (
    INFINITY,
    Batch,
    Infeasible,
    Instance,
    Job,
    PreconditionError,
    Schedule,
    SolveOutcome,
    validate_schedule,
)

_FORBIDDEN = 1 << 40


class OracleLimitError(ValueError):
    """Instance too large for exhaustive search."""


@dataclass(frozen=True)
class OracleConfig:
    max_jobs: int = 6
    max_horizon: int = 12
    time_budget: float = 60.0


# ---------------------------------------------------------------- matching


def min_cost_assignment(costs: np.ndarray, must_assign: int) -> tuple[int | None, list[int]]:
    """Cheapest way to seat exactly ``must_assign`` rows in distinct columns.

    Entries ``>= _FORBIDDEN`` are forbidden. Returns ``(None, [])`` when no
    such seating exists; otherwise the cost and, per row, its column or -1.
    """
    n, cols = costs.shape
    spare = n - must_assign
    if must_assign > cols:
        return None, []
    if n == 0:
        return 0, []
    # Zero-cost dummy columns absorb the rows left out. Every real seat costs
    # at least 1, so the optimum uses all of them.
    padded = np.hstack([costs, np.zeros((n, spare), dtype=costs.dtype)])
    rows, picked = linear_sum_assignment(padded)
    total = int(padded[rows, picked].sum())
    if total >= _FORBIDDEN:
        return None, []
    seat = [-1] * n
    for row, col in zip(rows, picked):
        if col < cols:
            seat[row] = int(col)
    return total, seat


def assignment_by_enumeration(costs: np.ndarray, must_assign: int) -> int | None:
    """Reference for :func:`min_cost_assignment` by trying every injection."""
    n, cols = costs.shape
    best = None
    for chosen in itertools.combinations(range(n), must_assign):
        for seats in itertools.permutations(range(cols), must_assign):
            c = sum(int(costs[row, col]) for row, col in zip(chosen, seats))
            if c < _FORBIDDEN and (best is None or c < best):
                best = c
    return best


# ---------------------------------------------------------------- oracle


def _start_sets(universe: list[int], k: int, p: int):
    """Every start set of size 1..k whose members are at least ``p`` apart."""
    def extend(prefix: list[int], pos: int):
        if prefix:
            yield tuple(prefix)
        if len(prefix) == k:
            return
        for i in range(pos, len(universe)):
            t = universe[i]
            if prefix and t - prefix[-1] < p:
                continue
            prefix.append(t)
            yield from extend(prefix, i + 1)
            prefix.pop()
    yield from extend([], 0)


def brute_force_oracle(inst: Instance, config: OracleConfig | None = None) -> SolveOutcome:
    """Exact minimum flow by exhaustive search over start sets.

    For each admissible start set the job-to-seat problem (``B`` seats per
    start) is a minimum-cost bipartite matching with edge cost
    ``start + p - release``.
    """
    config = config or OracleConfig()
    t0 = time.perf_counter()
    jobs = inst.jobs
    n, m = inst.n, inst.target
    if n > config.max_jobs:
        raise OracleLimitError(f"oracle refuses n = {n} > {config.max_jobs}")
    if m == 0:
        sched = Schedule(batches=(), total_flow=0, batches_used=0)
        return SolveOutcome(sched, "oracle", 0, {"start_sets": 0, "wall_time": 0.0})
    lo = min(j.release for j in jobs)
    hi = max(j.deadline for j in jobs)
    if hi - lo > config.max_horizon:
        raise OracleLimitError(f"oracle refuses horizon {hi - lo} > {config.max_horizon}")

    p, B = inst.p, inst.B
    universe = list(range(lo, hi - p + 1))
    r = np.array([j.release for j in jobs], dtype=np.int64)
    d = np.array([j.deadline for j in jobs], dtype=np.int64)
    grid = np.array(universe, dtype=np.int64)
    col_cost = grid[None, :] + p - r[:, None]
    ok = (grid[None, :] >= r[:, None]) & (grid[None, :] + p <= d[:, None])
    col_cost = np.where(ok, col_cost, _FORBIDDEN)
    index = {t: i for i, t in enumerate(universe)}

    best, best_plan, tried = None, None, 0
    min_batches = -(-m // B)
    for starts in _start_sets(universe, inst.k, p):
        if len(starts) < min_batches:
            continue
        tried += 1
        if tried % 256 == 0 and time.perf_counter() - t0 > config.time_budget:
            raise OracleLimitError(f"oracle exceeded its {config.time_budget}s budget")
        costs = np.repeat(col_cost[:, [index[t] for t in starts]], B, axis=1)
        value, seat = min_cost_assignment(costs, m)
        if value is not None and (best is None or value < best):
            best, best_plan = value, (starts, seat)

    stats = {"start_sets": tried, "wall_time": time.perf_counter() - t0}
    if best is None:
        return SolveOutcome(Infeasible(), "oracle", INFINITY, stats)
    starts, seat = best_plan
    members: dict[int, list[int]] = {t: [] for t in starts}
    for row, col in enumerate(seat):
        if col >= 0:
            members[starts[col // B]].append(jobs[row].id)
    sched = Schedule.from_batches(inst, (Batch(t, ids) for t, ids in members.items()))
    assert sched.total_flow == best
    return SolveOutcome(sched, "oracle", best, stats)


# ---------------------------------------------------------------- lazy activation


def _cap_deadlines(jobs: list[Job], B: int, p: int) -> tuple[list[Job], bool]:
    """Right-to-left sweep leaving at most ``B`` jobs per deadline.

    Extras at an overfull deadline are the smallest-index jobs (earliest
    release); their deadline drops by one.
    """
    order = sorted(jobs, key=lambda j: (j.deadline, j.release, j.id), reverse=True)
    out: dict[int, int] = {}
    feasible = True
    pool: list[Job] = []
    pos, n, t = 0, len(order), 0
    while pos < n or pool:
        if not pool:
            t = order[pos].deadline
        while pos < n and order[pos].deadline == t:
            pool.append(order[pos])
            pos += 1
        if len(pool) > B:
            pool.sort(key=lambda j: (j.release, j.id), reverse=True)
            stay, pool = pool[:B], pool[B:]
        else:
            stay, pool = pool, []
        for job in stay:
            out[job.id] = t
            if t < job.release + p:
                feasible = False
        t -= 1
    return [Job(j.id, j.release, out[j.id]) for j in jobs], feasible


def _lazy_forward(jobs: list[Job], B: int) -> dict[int, list[int]] | None:
    capped, feasible = _cap_deadlines(jobs, B, 1)
    if not feasible:
        return None
    pending = sorted(capped, key=lambda j: (j.deadline, j.id))
    slots: dict[int, list[int]] = {}
    done: set[int] = set()
    for job in pending:
        if job.id in done:
            continue
        tau = job.deadline - 1
        while tau >= job.release and len(slots.get(tau, ())) >= B:
            tau -= 1
        if tau < job.release:
            return None
        seats = slots.setdefault(tau, [])
        for other in pending:
            if len(seats) >= B:
                break
            if other.id not in done and other.release <= tau < other.deadline:
                seats.append(other.id)
                done.add(other.id)
    return slots


def lazy_activation(inst: Instance, reverse: bool = False) -> SolveOutcome:
    """Slot-minimal greedy for unit jobs.

    Opens a slot as late as possible for the earliest-deadline pending job and
    fills it earliest-deadline first (ties: smallest id). ``reverse`` runs the
    same greedy on the time-mirrored instance. If the greedy needs more than
    ``k`` slots, the outcome is Infeasible and ``stats["slots_needed"]`` says
    how many it used.
    """
    if inst.p != 1:
        raise PreconditionError(f"Lazy Activation needs p = 1, got p = {inst.p}",
                                check="unit_length")
    t0 = time.perf_counter()
    name = "lazy-reverse" if reverse else "lazy"
    jobs = list(inst.jobs)
    if reverse and jobs:
        horizon = max(j.deadline for j in jobs)
        mirrored = [Job(j.id, horizon - j.deadline, horizon - j.release) for j in jobs]
        slots = _lazy_forward(mirrored, inst.B)
        if slots is not None:
            slots = {horizon - 1 - t: ids for t, ids in slots.items()}
    else:
        slots = _lazy_forward(jobs, inst.B)
    stats = {"wall_time": time.perf_counter() - t0}
    if slots is None:
        stats["slots_needed"] = None
        return SolveOutcome(Infeasible(), name, INFINITY, stats)
    stats["slots_needed"] = len(slots)
    if len(slots) > inst.k:
        return SolveOutcome(Infeasible(), name, INFINITY, stats)
    sched = Schedule.from_batches(inst, (Batch(t, ids) for t, ids in slots.items()))
    report = validate_schedule(inst, sched)
    assert report.ok, report.violations
    return SolveOutcome(sched, name, sched.total_flow, stats)
