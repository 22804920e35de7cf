"""Release shifting to B-capacity compatibility, and agreeable-order helpers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Instance, Job


@dataclass(frozen=True)
class PreprocessResult:
    """Outcome of :func:`make_b_capacity_compatible`.

    ``transformed`` is ``None`` when some shifted release passes its job's
    latest start ``deadline - p`` (the instance is then infeasible for every
    budget).
    """

    transformed: Instance | None
    shift_total: int
    infeasible: bool
    original_releases: dict[int, int]
    shifted_releases: dict[int, int]


def make_b_capacity_compatible(inst: Instance) -> PreprocessResult:
    """Sweep release times left to right so no slot holds more than ``B`` releases.

    At an overfull slot the jobs with the largest ``(deadline, release, id)``
    move one slot right. On agreeable input that key order coincides with the
    sorted job order, so these are the largest-indexed jobs; on other input
    it keeps the earliest deadlines in place, which is what preserves
    feasibility.
    """
    original = {j.id: j.release for j in inst.jobs}
    jobs = inst.jobs
    n = len(jobs)
    shifted: dict[int, int] = {}
    infeasible = False
    pool: list[Job] = []
    pos = 0
    t = 0
    while pos < n or pool:
        if not pool:
            t = jobs[pos].release
        while pos < n and jobs[pos].release == t:
            pool.append(jobs[pos])
            pos += 1
        if len(pool) > inst.B:
            pool.sort(key=lambda j: (j.deadline, j.release, j.id))
            stay, pool = pool[: inst.B], pool[inst.B:]
        else:
            stay, pool = pool, []
        for job in stay:
            shifted[job.id] = t
            if t > job.deadline - inst.p:
                infeasible = True
        t += 1

    shift_total = sum(shifted[i] - original[i] for i in original)
    transformed = None
    if not infeasible:
        transformed = inst.replace(
            jobs=tuple(Job(j.id, shifted[j.id], j.deadline) for j in jobs)
        )
    return PreprocessResult(
        transformed=transformed,
        shift_total=shift_total,
        infeasible=infeasible,
        original_releases=original,
        shifted_releases=shifted,
    )


def is_b_capacity_compatible(inst: Instance) -> bool:
    if not inst.jobs:
        return True
    _, counts = np.unique(inst.releases(), return_counts=True)
    return bool(counts.max() <= inst.B)


def check_agreeable(inst: Instance) -> bool:
    """True iff deadlines are non-decreasing along the sorted job order.

    Jobs sharing a release are unconstrained relative to each other because
    the sort already orders them by deadline.
    """
    d = inst.deadlines()
    return bool(np.all(d[1:] >= d[:-1])) if len(d) > 1 else True


def predecessor_index(inst: Instance) -> np.ndarray:
    """``out[l - 1] = i_l``: the largest 1-based index with a strictly earlier release.

    Zero means no job is released earlier.
    """
    r = inst.releases()
    out = np.zeros(len(r), dtype=np.int64)
    last_change = 0
    for pos in range(1, len(r)):
        if r[pos] != r[pos - 1]:
            last_change = pos
        out[pos] = last_change
    return out


def distinct_release_prefix(releases: np.ndarray) -> np.ndarray:
    """``c[j]`` = number of distinct releases among the first ``j`` sorted jobs."""
    out = np.zeros(len(releases) + 1, dtype=np.int64)
    if len(releases):
        new = np.ones(len(releases), dtype=np.int64)
        new[1:] = releases[1:] != releases[:-1]
        np.cumsum(new, out=out[1:])
    return out
