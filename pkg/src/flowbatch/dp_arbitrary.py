"""Interval DP for arbitrary (possibly non-agreeable) deadlines.

Jobs are ordered by deadline. ``F(tl, tr, mu, a, j)`` is the least flow for
the jobs ``j' <= j`` released in ``(tl, tr]``, run in ``[tl + p, tr + p)``,
where the batch at ``tr`` (already opened by the caller) still has ``mu``
free seats and ``a`` further batches may start strictly inside, i.e. in
``[tl + p, tr - p]``. The largest-deadline job ``j`` either joins the batch at
``tr`` (R) or opens a batch at some interesting ``t`` that splits the
interval (I); with ``a1 + a2 = a - 1`` the two sides get the remaining
budget:

    R = F(tl, tr, mu - 1, a, j - 1) + (tr + p - r_j)
    I = F(tl, t, B - 1, a1, j - 1) + (t + p - r_j) + F(t, tr, mu, a2, j - 1)

Jobs released outside ``(tl, tr]`` are skipped at no cost. The full problem is
``F(min T - p, max T + p, 0, k, n)``; the right bookend never holds a job.
"""
from __future__ import annotations

import sys
import time
from dataclasses import dataclass

import numpy as np

from . import _accel
from .core import (
    INF_I64,
    INFINITY,
    Batch,
    Infeasible,
    Instance,
    Schedule,
    SolveOutcome,
    from_kernel,
)
from .dp_uniform import interesting_times
from .preprocess import make_b_capacity_compatible


@dataclass(frozen=True)
class BaptisteState:
    t_l: int
    t_r: int
    mu_r: int
    alpha: int
    j: int


# ---------------------------------------------------------------- kernels


def _arbitrary_fill_loop(rs, ds, tt, p, B, k, n, F):
    INF = INF_I64
    nt = tt.shape[0]
    count = 0
    for j in range(1, n + 1):
        rj = rs[j]
        dj = ds[j]
        for tl in range(nt):
            for tr in range(nt):
                inwin = tt[tl] < rj and rj <= tt[tr]
                for mu in range(B + 1):
                    for a in range(k + 1):
                        if not inwin:
                            F[j, tl, tr, mu, a] = F[j - 1, tl, tr, mu, a]
                            continue
                        best = INF
                        if mu > 0 and tt[tr] + p <= dj:
                            v = F[j - 1, tl, tr, mu - 1, a]
                            if v < INF:
                                best = v + tt[tr] + p - rj
                        if a >= 1:
                            for t in range(tl + 1, tr):
                                tv = tt[t]
                                if tv < tt[tl] + p or tv + p > tt[tr]:
                                    continue
                                if tv < rj or tv + p > dj:
                                    continue
                                for a1 in range(a):
                                    count += 1
                                    left = F[j - 1, tl, t, B - 1, a1]
                                    if left >= INF:
                                        continue
                                    right = F[j - 1, t, tr, mu, a - 1 - a1]
                                    if right >= INF:
                                        continue
                                    c = left + right + tv + p - rj
                                    if c < best:
                                        best = c
                        F[j, tl, tr, mu, a] = best
    return count


_arbitrary_fill_nb = _accel.njit(_arbitrary_fill_loop)


def _arbitrary_fill_np(rs, ds, tt, p, B, k, n, F):
    nt = tt.shape[0]
    count = 0
    upper = np.triu(np.ones((nt, nt), dtype=bool))
    for j in range(1, n + 1):
        rj, dj = rs[j], ds[j]
        prev = F[j - 1]
        inwin = (tt[:, None] < rj) & (rj <= tt[None, :]) & upper
        best = np.full(prev.shape, INF_I64, dtype=np.int64)
        seat_ok = (tt + p <= dj)[None, :, None, None] & (prev[:, :, :-1, :] < INF_I64)
        r_cost = prev[:, :, :-1, :] + (tt + p - rj)[None, :, None, None]
        best[:, :, 1:, :] = np.where(seat_ok, r_cost, INF_I64)
        for t in range(1, nt - 1):
            tv = tt[t]
            if tv < rj or tv + p > dj:
                continue
            rows = inwin & (tt + p <= tv)[:, None] & (tt - p >= tv)[None, :]
            if not rows.any():
                continue
            count += int(rows.sum()) * (B + 1) * (k * (k + 1) // 2)
            tl_idx, tr_idx = np.nonzero(rows)
            for a1 in range(k):
                left = prev[tl_idx, t, B - 1, a1]
                right = prev[t, tr_idx, :, : k - a1]
                ok = (left < INF_I64)[:, None, None] & (right < INF_I64)
                c = np.where(ok, left[:, None, None] + right + (tv + p - rj), INF_I64)
                cell = best[tl_idx, tr_idx, :, a1 + 1:]
                best[tl_idx, tr_idx, :, a1 + 1:] = np.minimum(cell, c)
        F[j] = np.where(inwin[:, :, None, None], best, prev)
    return count


# ---------------------------------------------------------------- tables


@dataclass
class ArbitraryDpTable:
    values: np.ndarray
    times: np.ndarray
    jobs: tuple
    p: int
    B: int
    k: int
    transitions: int

    def top(self):
        return from_kernel(self.values[len(self.jobs), 0, len(self.times) - 1, 0, self.k])


def deadline_order(inst: Instance) -> tuple:
    return tuple(sorted(inst.jobs, key=lambda j: (j.deadline, j.release, j.id)))


def candidate_times(inst: Instance, release_only: bool) -> np.ndarray:
    """Bookended candidate starts: ``[min - p] + T + [max + p]``."""
    if inst.n == 0:
        core = np.zeros(1, dtype=np.int64)
    elif release_only:
        core = np.unique(inst.releases())
    else:
        core = interesting_times(inst).times
    return np.concatenate(([core[0] - inst.p], core, [core[-1] + inst.p])).astype(np.int64)


def fill_arbitrary_table(inst: Instance, release_only: bool = False,
                         backend: str | None = None) -> ArbitraryDpTable:
    jobs = deadline_order(inst)
    n, k, B, p = inst.n, inst.k, inst.B, inst.p
    tt = candidate_times(inst, release_only)
    rs = np.zeros(n + 1, dtype=np.int64)
    ds = np.zeros(n + 1, dtype=np.int64)
    rs[1:] = [j.release for j in jobs]
    ds[1:] = [j.deadline for j in jobs]
    F = np.empty((n + 1, len(tt), len(tt), B + 1, k + 1), dtype=np.int64)
    F[0] = 0
    kernel = _arbitrary_fill_nb if _accel.resolve(backend) == "numba" else _arbitrary_fill_np
    count = kernel(rs, ds, tt, p, B, k, n, F)
    return ArbitraryDpTable(F, tt, jobs, p, B, k, int(count))


def reconstruct_arbitrary(tab: ArbitraryDpTable) -> dict[int, int]:
    """Job id -> start, following one optimal branch from the top state."""
    F, tt, jobs, p, B = tab.values, tab.times, tab.jobs, tab.p, tab.B
    starts: dict[int, int] = {}
    stack = [(len(jobs), 0, len(tt) - 1, 0, tab.k)]
    while stack:
        j, tl, tr, mu, a = stack.pop()
        while j > 0:
            job = jobs[j - 1]
            rj, dj = job.release, job.deadline
            if not tt[tl] < rj <= tt[tr]:
                j -= 1
                continue
            target = int(F[j, tl, tr, mu, a])
            if mu > 0 and tt[tr] + p <= dj:
                v = int(F[j - 1, tl, tr, mu - 1, a])
                if v < INF_I64 and v + int(tt[tr]) + p - rj == target:
                    starts[job.id] = int(tt[tr])
                    j, mu = j - 1, mu - 1
                    continue
            found = None
            for t in range(tl + 1, tr):
                tv = int(tt[t])
                if tv < tt[tl] + p or tv + p > tt[tr] or tv < rj or tv + p > dj:
                    continue
                for a1 in range(a):
                    left = int(F[j - 1, tl, t, B - 1, a1])
                    right = int(F[j - 1, t, tr, mu, a - 1 - a1])
                    if left < INF_I64 and right < INF_I64 and left + right + tv + p - rj == target:
                        found = (t, a1)
                        break
                if found:
                    break
            if found is None:  # pragma: no cover
                raise AssertionError(f"no branch reproduces state {(j, tl, tr, mu, a)}")
            t, a1 = found
            starts[job.id] = int(tt[t])
            stack.append((j - 1, t, tr, mu, a - 1 - a1))
            j, tr, mu, a = j - 1, t, B - 1, a1
    return starts


def solve_memo(inst: Instance, release_only: bool = False) -> tuple[int | object, int]:
    """Top-down memoised evaluation; returns ``(value, states_reached)``.

    Independent of the dense kernels, and touches only states reachable from
    the top call.
    """
    jobs = deadline_order(inst)
    p, B = inst.p, inst.B
    if not jobs:
        return 0, 0
    tt = [int(t) for t in candidate_times(inst, release_only)]
    memo: dict[tuple, int | object] = {}

    def opt(tl: int, tr: int, mu: int, a: int, j: int):
        while j > 0 and not tt[tl] < jobs[j - 1].release <= tt[tr]:
            j -= 1
        if j == 0:
            return 0
        key = (tl, tr, mu, a, j)
        if key in memo:
            return memo[key]
        job = jobs[j - 1]
        best = INFINITY
        if mu > 0 and tt[tr] + p <= job.deadline:
            best = min(best, opt(tl, tr, mu - 1, a, j - 1) + (tt[tr] + p - job.release))
        if a >= 1:
            for t in range(tl + 1, tr):
                tv = tt[t]
                if tv < tt[tl] + p or tv + p > tt[tr] or tv < job.release or tv + p > job.deadline:
                    continue
                for a1 in range(a):
                    left = opt(tl, t, B - 1, a1, j - 1)
                    if left is INFINITY:
                        continue
                    right = opt(t, tr, mu, a - 1 - a1, j - 1)
                    best = min(best, left + (tv + p - job.release) + right)
        memo[key] = best
        return best

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10_000))
    try:
        value = opt(0, len(tt) - 1, 0, inst.k, len(jobs))
    finally:
        sys.setrecursionlimit(limit)
    return value, len(memo)


def solve_arbitrary(inst: Instance, unit_speedup: bool | None = None,
                    backend: str | None = None) -> SolveOutcome:
    """Minimum flow for any deadlines.

    With ``p = 1`` (and ``unit_speedup`` left on) the instance is first made
    B-capacity compatible and only release times are tried as starts.
    ``opt_value`` is then the value under shifted releases, and the schedule's
    flow exceeds it by ``shift_total``.
    """
    t0 = time.perf_counter()
    release_only = inst.p == 1 if unit_speedup is None else (unit_speedup and inst.p == 1)
    name = "arbitrary-dp"
    if inst.target != inst.n:
        from .core import PreconditionError
        raise PreconditionError("arbitrary DP completes every job; m < n is unsupported",
                                check="full_completion", fallback="oracle")
    if inst.n == 0:
        return SolveOutcome(Schedule((), 0, 0), name, 0, {"wall_time": 0.0})
    work, shift = inst, 0
    if release_only:
        pre = make_b_capacity_compatible(inst)
        if pre.infeasible:
            return SolveOutcome(Infeasible(), name, INFINITY,
                                {"wall_time": time.perf_counter() - t0, "preprocess": "infeasible"},
                                shift_total=pre.shift_total)
        work, shift = pre.transformed, pre.shift_total
    tab = fill_arbitrary_table(work, release_only=release_only, backend=backend)
    value = tab.top()
    stats = {
        "table_entries": int(tab.values.size),
        "candidate_times": int(len(tab.times) - 2),
        "release_only": release_only,
        "transitions": tab.transitions,
        "backend": _accel.resolve(backend),
    }
    result = Infeasible()
    if value is not INFINITY:
        starts = reconstruct_arbitrary(tab)
        groups: dict[int, list[int]] = {}
        for jid, t in starts.items():
            groups.setdefault(t, []).append(jid)
        result = Schedule.from_batches(inst, (Batch(t, ids) for t, ids in groups.items()))
    stats["wall_time"] = time.perf_counter() - t0
    return SolveOutcome(result, name, value, stats, shift_total=shift)
