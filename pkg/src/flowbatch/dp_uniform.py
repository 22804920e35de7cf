"""Length-``p`` jobs with agreeable deadlines, indexed by the last batch start.

``V[a, j, t]`` is the least flow for the first ``j`` jobs in at most ``a``
batches whose last batch starts at ``t`` (an interesting time, or the
bookend ``min(T) - p`` that anchors the empty prefix):

    V[a, j, t] = min_{b, t' <= t - p} V[a - 1, b, t'] + sum_{u=b+1..j} (t - r_u + p)

over ``b`` in ``[j - B, j - 1]`` with ``d_{b+1} >= t + p``. A running prefix
minimum over ``t'`` makes each ``(a, j, t, b)`` transition O(1).
"""
from __future__ import annotations

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
    InstanceError,
    PreconditionError,
    Schedule,
    SolveOutcome,
    from_kernel,
    release_prefix_sums,
)
from .preprocess import check_agreeable


@dataclass(frozen=True)
class InterestingTimes:
    times: np.ndarray
    bookend: int

    def with_bookend(self) -> np.ndarray:
        """Index 0 is the bookend, then ``times`` in order."""
        return np.concatenate(([self.bookend], self.times)).astype(np.int64)


def interesting_times(inst: Instance) -> InterestingTimes:
    """``{r_j + p * u : 0 <= u <= n}``, sorted and deduplicated."""
    if inst.n == 0:
        raise InstanceError("interesting times need at least one job")
    r = inst.releases()
    grid = (r[:, None] + inst.p * np.arange(inst.n + 1)[None, :]).ravel()
    times = np.unique(grid)
    return InterestingTimes(times=times, bookend=int(times[0]) - inst.p)


def _predecessors(tt: np.ndarray, p: int) -> np.ndarray:
    """``pred[i]`` = largest index whose time is ``<= tt[i] - p`` (or -1)."""
    return np.searchsorted(tt, tt - p, side="right") - 1


# ---------------------------------------------------------------- kernels


def _uniform_fill_loop(r, d, S, tt, pred, p, B, k, n, V, PM):
    INF = INF_I64
    nt = tt.shape[0]
    count = 0
    for a in range(k + 1):
        for ti in range(nt):
            V[a, 0, ti] = 0
            PM[a, 0, ti] = 0
    for a in range(1, k + 1):
        jmax = min(n, B * a)
        for j in range(1, jmax + 1):
            rj = r[j]
            running = INF
            for ti in range(nt):
                t = tt[ti]
                best = INF
                if t >= rj and t + p <= d[j]:
                    pi = pred[ti]
                    for b in range(max(j - B, 0), j):
                        count += 1
                        if d[b + 1] < t + p or pi < 0:
                            continue
                        prev = PM[a - 1, b, pi]
                        if prev >= INF:
                            continue
                        c = prev + (j - b) * (t + p) - (S[j] - S[b])
                        if c < best:
                            best = c
                V[a, j, ti] = best
                if best < running:
                    running = best
                PM[a, j, ti] = running
    return count


_uniform_fill_nb = _accel.njit(_uniform_fill_loop)


def _uniform_fill_np(r, d, S, tt, pred, p, B, k, n, V, PM):
    count = 0
    V[:, 0, :] = 0
    PM[:, 0, :] = 0
    has_pred = pred >= 0
    pc = np.where(has_pred, pred, 0)
    for a in range(1, k + 1):
        for j in range(1, min(n, B * a) + 1):
            window = (tt >= r[j]) & (tt + p <= d[j])
            best = np.full(tt.shape[0], INF_I64, dtype=np.int64)
            count += int(window.sum()) * (j - max(j - B, 0))
            for b in range(max(j - B, 0), j):
                prev = PM[a - 1, b, pc]
                ok = window & has_pred & (d[b + 1] >= tt + p) & (prev < INF_I64)
                c = prev + (j - b) * (tt + p) - (S[j] - S[b])
                np.copyto(best, c, where=ok & (c < best))
            V[a, j] = best
            PM[a, j] = np.minimum.accumulate(best)
    return count


def _uniform_subset_fill_loop(r, d, S, tt, pred, p, B, k, n, m, V, PM):
    INF = INF_I64
    nt = tt.shape[0]
    count = 0
    for a in range(k + 1):
        for j in range(n + 1):
            for ti in range(nt):
                V[a, j, 0, ti] = 0
                PM[a, j, 0, ti] = 0
    for a in range(1, k + 1):
        for j in range(1, n + 1):
            rj = r[j]
            for q in range(1, min(j, m) + 1):
                if B * a < q:
                    continue
                running = INF
                for ti in range(nt):
                    t = tt[ti]
                    best = INF
                    if q <= j - 1:
                        best = V[a, j - 1, q, ti]
                    if t >= rj:
                        pi = pred[ti]
                        for b in range(max(j - B, j - q, 0), j):
                            count += 1
                            if d[b + 1] < t + p or pi < 0:
                                continue
                            prev = PM[a - 1, b, q - (j - b), pi]
                            if prev >= INF:
                                continue
                            c = prev + (j - b) * (t + p) - (S[j] - S[b])
                            if c < best:
                                best = c
                    V[a, j, q, ti] = best
                    if best < running:
                        running = best
                    PM[a, j, q, ti] = running
    return count


_uniform_subset_fill_nb = _accel.njit(_uniform_subset_fill_loop)


def _uniform_subset_fill_np(r, d, S, tt, pred, p, B, k, n, m, V, PM):
    count = 0
    V[:, :, 0, :] = 0
    PM[:, :, 0, :] = 0
    has_pred = pred >= 0
    pc = np.where(has_pred, pred, 0)
    for a in range(1, k + 1):
        for j in range(1, n + 1):
            released = tt >= r[j]
            for q in range(1, min(j, m) + 1):
                if B * a < q:
                    continue
                best = np.full(tt.shape[0], INF_I64, dtype=np.int64)
                if q <= j - 1:
                    best[:] = V[a, j - 1, q]
                lo = max(j - B, j - q, 0)
                count += int(released.sum()) * (j - lo)
                for b in range(lo, j):
                    prev = PM[a - 1, b, q - (j - b), pc]
                    ok = released & has_pred & (d[b + 1] >= tt + p) & (prev < INF_I64)
                    c = prev + (j - b) * (tt + p) - (S[j] - S[b])
                    np.copyto(best, c, where=ok & (c < best))
                V[a, j, q] = best
                PM[a, j, q] = np.minimum.accumulate(best)
    return count


def fill_uniform_naive(inst: Instance, k: int | None = None) -> np.ndarray:
    """Direct double iteration over ``(t, t')`` without prefix minima.

    Slow by a factor of ``|T|``; kept as an executable cross-check of the
    fast kernels.
    """
    k = inst.k if k is None else k
    r, d, S, tt, _ = _arrays(inst)
    n, p, B = inst.n, inst.p, inst.B
    V = np.full((k + 1, n + 1, len(tt)), INF_I64, dtype=np.int64)
    V[:, 0, :] = 0
    for a in range(1, k + 1):
        for j in range(1, n + 1):
            if B * a < j:
                continue
            for ti, t in enumerate(tt):
                if t < r[j] or t + p > d[j]:
                    continue
                best = INF_I64
                for b in range(max(j - B, 0), j):
                    if d[b + 1] < t + p:
                        continue
                    for tj, t2 in enumerate(tt):
                        if t2 > t - p or V[a - 1, b, tj] >= INF_I64:
                            continue
                        best = min(best, V[a - 1, b, tj] + (j - b) * (t + p) - (S[j] - S[b]))
                V[a, j, ti] = best
    return V


# ---------------------------------------------------------------- tables


@dataclass
class UniformDpTable:
    values: np.ndarray
    prefix_min: np.ndarray
    times: np.ndarray
    pred: np.ndarray
    r: np.ndarray
    d: np.ndarray
    S: np.ndarray
    p: int
    B: int
    transitions: int


def _arrays(inst: Instance):
    n = inst.n
    r = np.zeros(n + 1, dtype=np.int64)
    d = np.zeros(n + 1, dtype=np.int64)
    r[1:] = inst.releases()
    d[1:] = inst.deadlines()
    S = release_prefix_sums(r[1:])
    if n:
        tt = interesting_times(inst).with_bookend()
    else:
        tt = np.zeros(1, dtype=np.int64)
    return r, d, S, tt, _predecessors(tt, inst.p)


def fill_uniform_table(inst: Instance, k: int | None = None, backend: str | None = None,
                       m: int | None = None) -> UniformDpTable:
    """Fill the full table, or the ``q``-indexed subset table when ``m`` is given."""
    k = inst.k if k is None else k
    n = inst.n
    r, d, S, tt, pred = _arrays(inst)
    use_nb = _accel.resolve(backend) == "numba"
    if m is None:
        V = np.full((k + 1, n + 1, len(tt)), INF_I64, dtype=np.int64)
        PM = V.copy()
        kernel = _uniform_fill_nb if use_nb else _uniform_fill_np
        count = kernel(r, d, S, tt, pred, inst.p, inst.B, k, n, V, PM)
    else:
        V = np.full((k + 1, n + 1, m + 1, len(tt)), INF_I64, dtype=np.int64)
        PM = V.copy()
        kernel = _uniform_subset_fill_nb if use_nb else _uniform_subset_fill_np
        count = kernel(r, d, S, tt, pred, inst.p, inst.B, k, n, m, V, PM)
    return UniformDpTable(V, PM, tt, pred, r, d, S, inst.p, inst.B, int(count))


def _batch_cost(tab: UniformDpTable, b: int, j: int, t: int) -> int:
    return int((j - b) * (t + tab.p) - (tab.S[j] - tab.S[b]))


def _first_at_most(row: np.ndarray, upto: int, target: int) -> int:
    """Smallest index ``<= upto`` holding ``target`` in a table row."""
    hits = np.flatnonzero(row[: upto + 1] == target)
    return int(hits[0])


def reconstruct_uniform(inst: Instance, tab: UniformDpTable, a: int) -> list[Batch]:
    jobs = inst.jobs
    j = inst.n
    V, PM, tt = tab.values, tab.prefix_min, tab.times
    ti = _first_at_most(V[a, j], len(tt) - 1, int(PM[a, j, -1]))
    batches: list[Batch] = []
    while j > 0:
        t = int(tt[ti])
        target = int(V[a, j, ti])
        pi = int(tab.pred[ti])
        for b in range(max(j - tab.B, 0), j):
            if tab.d[b + 1] < t + tab.p:
                continue
            prev = int(PM[a - 1, b, pi])
            if prev < INF_I64 and prev + _batch_cost(tab, b, j, t) == target:
                break
        else:  # pragma: no cover
            raise AssertionError(f"no predecessor for state ({a}, {j}, {t})")
        batches.append(Batch(t, [jobs[u].id for u in range(b, j)]))
        ti = _first_at_most(V[a - 1, b], pi, prev)
        j, a = b, a - 1
    return batches


def reconstruct_uniform_subset(inst: Instance, tab: UniformDpTable, a: int, q: int) -> list[Batch]:
    jobs = inst.jobs
    j = inst.n
    V, PM, tt = tab.values, tab.prefix_min, tab.times
    ti = _first_at_most(V[a, j, q], len(tt) - 1, int(PM[a, j, q, -1]))
    batches: list[Batch] = []
    while q > 0:
        target = int(V[a, j, q, ti])
        if q <= j - 1 and int(V[a, j - 1, q, ti]) == target:
            j -= 1
            continue
        t = int(tt[ti])
        pi = int(tab.pred[ti])
        for b in range(max(j - tab.B, j - q, 0), j):
            if tab.d[b + 1] < t + tab.p:
                continue
            prev = int(PM[a - 1, b, q - (j - b), pi])
            if prev < INF_I64 and prev + _batch_cost(tab, b, j, t) == target:
                break
        else:  # pragma: no cover
            raise AssertionError(f"no predecessor for state ({a}, {j}, {q}, {t})")
        batches.append(Batch(t, [jobs[u].id for u in range(b, j)]))
        q -= j - b
        if q > 0:
            ti = _first_at_most(V[a - 1, b, q], pi, prev)
        j, a = b, a - 1
    return batches


# ---------------------------------------------------------------- solvers


def _require_agreeable(inst: Instance) -> None:
    if not check_agreeable(inst):
        raise PreconditionError("uniform DP needs agreeable deadlines (check_agreeable failed)",
                                check="check_agreeable")


def _stats(tab: UniformDpTable, t0: float, backend: str | None) -> dict:
    return {
        "table_entries": int(tab.values.size),
        "interesting_times": int(len(tab.times) - 1),
        "transitions": tab.transitions,
        "backend": _accel.resolve(backend),
        "wall_time": time.perf_counter() - t0,
    }


def solve_uniform_agreeable(inst: Instance, backend: str | None = None) -> SolveOutcome:
    _require_agreeable(inst)
    if inst.m is not None and inst.m < inst.n:
        raise PreconditionError("m < n: use solve_uniform_agreeable_subset",
                                check="full_completion", fallback="uniform-dp subset")
    t0 = time.perf_counter()
    if inst.n == 0:
        return SolveOutcome(Schedule((), 0, 0), "uniform-dp", 0, {"wall_time": 0.0})
    tab = fill_uniform_table(inst, backend=backend)
    value = from_kernel(tab.prefix_min[inst.k, inst.n, -1])
    result = Infeasible()
    if value is not INFINITY:
        result = Schedule.from_batches(inst, reconstruct_uniform(inst, tab, inst.k))
    return SolveOutcome(result, "uniform-dp", value, _stats(tab, t0, backend))


def solve_uniform_agreeable_subset(inst: Instance, backend: str | None = None) -> SolveOutcome:
    """Best ``m``-subset schedule.

    The last batch may close with any job ``l <= j``: ``V[a, j, t]_q`` keeps the
    better of skipping job ``j`` (``V[a, j - 1, t]_q``) and ending the last batch
    with it. Window checks apply to the batch actually formed, never to an
    unscheduled job ``j``.
    """
    _require_agreeable(inst)
    m = inst.target
    t0 = time.perf_counter()
    if m == 0:
        return SolveOutcome(Schedule((), 0, 0), "uniform-dp-subset", 0, {"wall_time": 0.0})
    tab = fill_uniform_table(inst, backend=backend, m=m)
    value = from_kernel(tab.prefix_min[inst.k, inst.n, m, -1])
    result = Infeasible()
    if value is not INFINITY:
        result = Schedule.from_batches(inst, reconstruct_uniform_subset(inst, tab, inst.k, m))
    return SolveOutcome(result, "uniform-dp-subset", value, _stats(tab, t0, backend))
