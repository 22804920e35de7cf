"""Domain types shared by every solver, plus the independent schedule checker.

Time is slotted and integral. A batch started at slot ``t`` occupies
``[t, t + p)`` and every job in it completes at ``t + p``; a job ``j`` may sit
in that batch iff ``release_j <= t`` and ``t + p <= deadline_j``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np


class _Infinity:
    """Sentinel for an infeasible (sub)problem value.

    Compares greater than every integer and absorbs addition. It is never
    produced by integer arithmetic, only assigned.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("flowbatch.INFINITY")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INFINITY = _Infinity()

# Kernel-side sentinel. Chosen so that a sum of two finite values can never
# reach it; kernels test for it before adding.
INF_I64 = np.int64(1) << np.int64(60)


def from_kernel(value) -> int | _Infinity:
    value = int(value)
    return INFINITY if value >= INF_I64 else value


class InstanceError(ValueError):
    """Malformed instance (bad windows, duplicate ids, bad parameters)."""


class PreconditionError(ValueError):
    """A solver was called on an instance class it does not handle."""

    def __init__(self, message: str, check: str, fallback: str | None = "arbitrary-dp"):
        super().__init__(message)
        self.check = check
        self.fallback = fallback


@dataclass(frozen=True)
class Job:
    id: int
    release: int
    deadline: int

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.release, self.deadline, self.id)


@dataclass(frozen=True)
class Instance:
    """A solver input. Jobs are kept sorted by ``(release, deadline, id)``.

    ``original_order`` lists job ids in the order they were supplied.
    """

    p: int
    B: int
    k: int
    jobs: tuple[Job, ...]
    m: int | None = None
    original_order: tuple[int, ...] = ()
    meta: Mapping[str, Any] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.p < 1:
            raise InstanceError(f"p must be a positive integer, got {self.p}")
        if self.B < 1:
            raise InstanceError(f"B must be a positive integer, got {self.B}")
        if self.k < 0:
            raise InstanceError(f"k must be non-negative, got {self.k}")
        supplied = tuple(j.id for j in self.jobs)
        jobs = tuple(sorted(self.jobs, key=lambda j: j.key))
        ids = [j.id for j in jobs]
        if len(set(ids)) != len(ids):
            raise InstanceError("job ids must be unique")
        negative = [j.id for j in jobs if j.release < 0]
        if negative:
            raise InstanceError(f"release times must be >= 0 (jobs {negative})")
        bad = [j for j in jobs if j.deadline < j.release + self.p]
        if bad:
            lines = "; ".join(
                f"job {j.id}: deadline {j.deadline} < release {j.release} + p {self.p}" for j in bad
            )
            raise InstanceError(f"individually infeasible jobs: {lines}")
        if self.m is not None and not 0 <= self.m <= len(jobs):
            raise InstanceError(f"m must lie in [0, {len(jobs)}], got {self.m}")
        object.__setattr__(self, "jobs", jobs)
        order = tuple(self.original_order) or supplied
        if sorted(order) != sorted(ids):
            raise InstanceError("original_order must be a permutation of the job ids")
        object.__setattr__(self, "original_order", order)

    @classmethod
    def from_pairs(cls, windows: Iterable[tuple[int, int]], *, p: int = 1, B: int = 1,
                   k: int = 0, m: int | None = None) -> "Instance":
        """Build an instance from ``(release, deadline)`` pairs; ids follow input order."""
        jobs = [Job(i, int(r), int(d)) for i, (r, d) in enumerate(windows)]
        return cls(p=p, B=B, k=k, jobs=tuple(jobs), m=m)

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def target(self) -> int:
        """Number of jobs that must be scheduled."""
        return self.n if self.m is None else self.m

    def by_id(self) -> dict[int, Job]:
        return {j.id: j for j in self.jobs}

    def replace(self, **changes) -> "Instance":
        fields = dict(p=self.p, B=self.B, k=self.k, jobs=self.jobs, m=self.m,
                      original_order=self.original_order, meta=self.meta)
        fields.update(changes)
        return Instance(**fields)

    def releases(self) -> np.ndarray:
        return np.array([j.release for j in self.jobs], dtype=np.int64)

    def deadlines(self) -> np.ndarray:
        return np.array([j.deadline for j in self.jobs], dtype=np.int64)


@dataclass(frozen=True)
class Batch:
    start: int
    job_ids: frozenset[int]

    def __init__(self, start: int, job_ids: Iterable[int]):
        object.__setattr__(self, "start", int(start))
        object.__setattr__(self, "job_ids", frozenset(int(i) for i in job_ids))


@dataclass(frozen=True)
class Schedule:
    batches: tuple[Batch, ...]
    total_flow: int
    batches_used: int

    @classmethod
    def from_batches(cls, inst: Instance, batches: Iterable[Batch]) -> "Schedule":
        """Drop empty batches, sort by start and score against ``inst``'s releases."""
        kept = tuple(sorted((b for b in batches if b.job_ids), key=lambda b: b.start))
        by_id = inst.by_id()
        flow = sum(b.start + inst.p - by_id[i].release for b in kept for i in b.job_ids)
        return cls(batches=kept, total_flow=flow, batches_used=len(kept))

    def assignment(self) -> dict[int, int]:
        return {i: b.start for b in self.batches for i in b.job_ids}


class Infeasible:
    """Certificate that no schedule exists within the budget."""

    def __repr__(self) -> str:
        return "Infeasible()"

    def __eq__(self, other):
        return isinstance(other, Infeasible)

    def __hash__(self):
        return hash(Infeasible)


@dataclass
class SolveOutcome:
    """Solver result.

    ``opt_value`` is the objective the algorithm itself optimised; for a
    preprocessed unit instance that is the flow under shifted releases, and
    ``shift_total`` bridges it to the original-release figure in ``flow``.
    """

    result: Schedule | Infeasible
    algorithm: str
    opt_value: int | _Infinity
    stats: dict[str, Any] = field(default_factory=dict)
    shift_total: int = 0

    def __post_init__(self):
        if isinstance(self.result, Infeasible) != (self.opt_value is INFINITY):
            raise ValueError("result is Infeasible iff opt_value is INFINITY")

    @property
    def feasible(self) -> bool:
        return not isinstance(self.result, Infeasible)

    @property
    def flow(self) -> int | _Infinity:
        """Flow time of the schedule scored against the original releases."""
        return self.result.total_flow if self.feasible else INFINITY


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]
    flow: int


def validate_schedule(inst: Instance, sched: Schedule) -> ValidationReport:
    """Check ``sched`` against every model constraint of ``inst``.

    Never raises on a bad schedule; each broken rule becomes a violation
    string. The returned flow is recomputed from the batch starts.
    """
    violations: list[str] = []
    by_id = inst.by_id()
    seen: set[int] = set()
    flow = 0
    prev_start = None
    for pos, batch in enumerate(sched.batches):
        size = len(batch.job_ids)
        if batch.start < 0:
            violations.append(f"batch {pos}: negative start {batch.start}")
        if size == 0:
            violations.append(f"batch {pos}: empty batch at {batch.start}")
        if size > inst.B:
            violations.append(f"batch {pos}: capacity exceeded ({size} > B={inst.B})")
        if prev_start is not None:
            if batch.start < prev_start:
                violations.append(f"batch {pos}: batches not sorted by start")
            elif batch.start - prev_start < inst.p:
                violations.append(
                    f"batch {pos}: overlapping/unsynchronized batches "
                    f"(starts {prev_start} and {batch.start}, p={inst.p})"
                )
        prev_start = batch.start
        for jid in sorted(batch.job_ids):
            job = by_id.get(jid)
            if job is None:
                violations.append(f"batch {pos}: unknown job id {jid}")
                continue
            if jid in seen:
                violations.append(f"job {jid}: scheduled more than once")
            seen.add(jid)
            if batch.start < job.release:
                violations.append(f"job {jid}: starts at {batch.start} before release {job.release}")
            if batch.start + inst.p > job.deadline:
                violations.append(
                    f"job {jid}: completes at {batch.start + inst.p} after deadline {job.deadline}"
                )
            flow += batch.start + inst.p - job.release
    if len(sched.batches) > inst.k:
        violations.append(f"budget exceeded: {len(sched.batches)} batches > k={inst.k}")
    if sched.batches_used != len(sched.batches):
        violations.append(
            f"batches_used {sched.batches_used} != number of batches {len(sched.batches)}"
        )
    if len(seen) != inst.target:
        violations.append(f"scheduled {len(seen)} distinct jobs, expected {inst.target}")
    if sched.total_flow != flow:
        violations.append(f"flow mismatch: reported {sched.total_flow}, recomputed {flow}")
    return ValidationReport(ok=not violations, violations=tuple(violations), flow=flow)


def flow_of_assignment(inst: Instance, assignment: Mapping[int, int]) -> int:
    """Total flow of a job-id -> start-slot map.

    Raises :class:`InstanceError` naming the first job whose start falls
    outside ``[release, deadline - p]``.
    """
    by_id = inst.by_id()
    total = 0
    for jid, start in assignment.items():
        job = by_id.get(jid)
        if job is None:
            raise InstanceError(f"job {jid}: not in instance")
        if not job.release <= start <= job.deadline - inst.p:
            raise InstanceError(
                f"job {jid}: start {start} outside window [{job.release}, {job.deadline - inst.p}]"
            )
        total += start + inst.p - job.release
    return total


def release_prefix_sums(releases: Sequence[int]) -> np.ndarray:
    """``S[j] = r_1 + ... + r_j`` with ``S[0] = 0`` (1-based job prefix)."""
    out = np.zeros(len(releases) + 1, dtype=np.int64)
    np.cumsum(np.asarray(releases, dtype=np.int64), out=out[1:])
    return out
