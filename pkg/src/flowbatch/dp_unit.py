"""Unit-length jobs with agreeable deadlines.

``V[a, j]`` is the least flow for the first ``j`` jobs (sorted by release,
then deadline) in at most ``a`` unit batches. On a B-capacity compatible
instance the last batch of some optimal schedule holds a suffix
``[b + 1, j]`` at slot ``r_j`` with ``r_b < r_j``, so

    V[a, j] = min_b V[a - 1, b] + sum_{u=b+1..j} (r_j - r_u + 1)

over ``b`` in ``[j - B, i_j]`` with ``d_{b+1} > r_j``. The inner sum is
``(j - b)(r_j + 1) - (S_j - S_b)`` with ``S`` the release prefix sums.
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
    PreconditionError,
    Schedule,
    SolveOutcome,
    from_kernel,
    release_prefix_sums,
)
from .preprocess import (
    check_agreeable,
    distinct_release_prefix,
    is_b_capacity_compatible,
    predecessor_index,
)


# ---------------------------------------------------------------- kernels


def _unit_fill_loop(r, S, ipred, blo, distinct, B, k, n, V):
    INF = INF_I64
    count = 0
    for a in range(k + 1):
        V[a, 0] = 0
    for a in range(1, k + 1):
        jmax = min(n, B * a)
        for j in range(1, jmax + 1):
            if distinct[j] <= a:
                V[a, j] = j
                continue
            lo = max(j - B, blo[j])
            hi = ipred[j]
            rj1 = r[j] + 1
            best = INF
            for b in range(lo, hi + 1):
                count += 1
                prev = V[a - 1, b]
                if prev >= INF:
                    continue
                c = prev + (j - b) * rj1 - (S[j] - S[b])
                if c < best:
                    best = c
            V[a, j] = best
    return count


_unit_fill_nb = _accel.njit(_unit_fill_loop)


def _unit_fill_np(r, S, ipred, blo, distinct, B, k, n, V):
    count = 0
    V[:, 0] = 0
    for a in range(1, k + 1):
        jmax = min(n, B * a)
        if jmax == 0:
            continue
        js = np.arange(1, jmax + 1)
        prev = V[a - 1]
        lo = np.maximum(js - B, blo[js])
        hi = ipred[js]
        ext = distinct[js] <= a
        count += int(np.maximum(hi - lo + 1, 0)[~ext].sum())
        best = np.full(jmax, INF_I64, dtype=np.int64)
        rj1 = r[js] + 1
        Sj = S[js]
        for s in range(1, B + 1):
            b = js - s
            ok = (b >= lo) & (b <= hi)
            bc = np.where(ok, b, 0)
            pv = prev[bc]
            ok &= pv < INF_I64
            c = pv + s * rj1 - (Sj - S[bc])
            np.copyto(best, c, where=ok & (c < best))
        best[ext] = js[ext]
        V[a, 1: jmax + 1] = best
    return count


def _subset_fill_loop(r, S, ipred, blo, cover, B, k, n, m, V):
    INF = INF_I64
    count = 0
    for a in range(k + 1):
        for j in range(n + 1):
            V[a, j, 0] = 0
    for a in range(1, k + 1):
        for j in range(1, n + 1):
            rj1 = r[j] + 1
            for q in range(1, min(j, m) + 1):
                if B * a < q:
                    continue
                if cover[j, q] <= a:
                    V[a, j, q] = q
                    continue
                best = INF
                if q <= j - 1:
                    best = V[a, j - 1, q]
                lo = max(j - B, j - q, blo[j])
                hi = ipred[j]
                for b in range(lo, hi + 1):
                    count += 1
                    prev = V[a - 1, b, q - (j - b)]
                    if prev >= INF:
                        continue
                    c = prev + (j - b) * rj1 - (S[j] - S[b])
                    if c < best:
                        best = c
                V[a, j, q] = best
    return count


_subset_fill_nb = _accel.njit(_subset_fill_loop)


def _subset_fill_np(r, S, ipred, blo, cover, B, k, n, m, V):
    count = 0
    V[:, :, 0] = 0
    for a in range(1, k + 1):
        for j in range(1, n + 1):
            qmax = min(j, m)
            if qmax == 0:
                continue
            qs = np.arange(1, qmax + 1)
            best = np.full(qmax, INF_I64, dtype=np.int64)
            if j - 1 >= 1:
                upto = min(qmax, j - 1)
                best[:upto] = V[a, j - 1, 1: upto + 1]
            hi = int(ipred[j])
            base_lo = max(j - B, int(blo[j]))
            lo_q = np.maximum(base_lo, j - qs)
            ext = cover[j, 1: qmax + 1] <= a
            live = ~ext & (B * a >= qs)
            count += int(np.maximum(hi - lo_q + 1, 0)[live].sum())
            for b in range(max(base_lo, j - qmax), hi + 1):
                ok = qs >= j - b
                qprev = np.where(ok, qs - (j - b), 0)
                pv = V[a - 1, b, qprev]
                ok &= pv < INF_I64
                c = pv + (j - b) * (r[j] + 1) - (S[j] - S[b])
                np.copyto(best, c, where=ok & (c < best))
            best[ext] = qs[ext]
            best[B * a < qs] = INF_I64
            V[a, j, 1: qmax + 1] = best
    return count


# ---------------------------------------------------------------- tables


@dataclass
class UnitDpTable:
    """Filled table plus the arrays needed to walk it back.

    Arrays are 1-based over the sorted jobs (index 0 is padding).
    """

    values: np.ndarray
    r: np.ndarray
    d: np.ndarray
    S: np.ndarray
    ipred: np.ndarray
    blo: np.ndarray
    distinct_releases_prefix: np.ndarray
    B: int
    transitions: int

    def value(self, a: int, j: int):
        return from_kernel(self.values[a, j])


@dataclass
class SubsetUnitDpTable:
    values: np.ndarray
    r: np.ndarray
    S: np.ndarray
    ipred: np.ndarray
    blo: np.ndarray
    cover: np.ndarray
    B: int
    m: int
    transitions: int

    def value(self, a: int, j: int, q: int):
        return from_kernel(self.values[a, j, q])


def _check_preconditions(inst: Instance) -> None:
    if inst.p != 1:
        raise PreconditionError(f"unit DP needs p = 1, got p = {inst.p}", check="unit_length")
    if not check_agreeable(inst):
        raise PreconditionError("unit DP needs agreeable deadlines (check_agreeable failed)",
                                check="check_agreeable")
    if not is_b_capacity_compatible(inst):
        raise PreconditionError(
            "unit DP needs a B-capacity compatible instance; run make_b_capacity_compatible first",
            check="b_capacity_compatible", fallback=None,
        )


def _common_arrays(inst: Instance):
    n = inst.n
    r = np.zeros(n + 1, dtype=np.int64)
    d = np.zeros(n + 1, dtype=np.int64)
    r[1:] = inst.releases()
    d[1:] = inst.deadlines()
    S = release_prefix_sums(r[1:])
    ipred = np.zeros(n + 1, dtype=np.int64)
    ipred[1:] = predecessor_index(inst)
    # Deadlines are non-decreasing, so d_{b+1} > r_j holds exactly for
    # b >= blo[j].
    blo = np.zeros(n + 1, dtype=np.int64)
    if n:
        blo[1:] = np.searchsorted(d[1:], r[1:], side="right")
    return r, d, S, ipred, blo


def fill_unit_table(inst: Instance, k: int | None = None, backend: str | None = None) -> UnitDpTable:
    k = inst.k if k is None else k
    n = inst.n
    r, d, S, ipred, blo = _common_arrays(inst)
    distinct = distinct_release_prefix(r[1:])
    V = np.full((k + 1, n + 1), INF_I64, dtype=np.int64)
    kernel = _unit_fill_nb if _accel.resolve(backend) == "numba" else _unit_fill_np
    count = kernel(r, S, ipred, blo, distinct, inst.B, k, n, V)
    return UnitDpTable(V, r, d, S, ipred, blo, distinct, inst.B, int(count))


def release_cover_table(r: np.ndarray, n: int, m: int) -> np.ndarray:
    """``cover[j, q]``: fewest release groups among jobs ``1..j`` holding ``q`` jobs.

    Groups are disjoint, so taking them largest first is optimal.
    """
    cover = np.full((n + 1, m + 1), np.iinfo(np.int64).max // 2, dtype=np.int64)
    cover[:, 0] = 0
    sizes: dict[int, int] = {}
    for j in range(1, n + 1):
        sizes[int(r[j])] = sizes.get(int(r[j]), 0) + 1
        acc = np.cumsum(sorted(sizes.values(), reverse=True))
        qs = np.arange(1, min(j, m) + 1)
        cover[j, 1: len(qs) + 1] = np.searchsorted(acc, qs, side="left") + 1
    return cover


def fill_subset_table(inst: Instance, m: int, k: int | None = None,
                      backend: str | None = None) -> SubsetUnitDpTable:
    k = inst.k if k is None else k
    n = inst.n
    r, d, S, ipred, blo = _common_arrays(inst)
    cover = release_cover_table(r, n, m)
    V = np.full((k + 1, n + 1, m + 1), INF_I64, dtype=np.int64)
    kernel = _subset_fill_nb if _accel.resolve(backend) == "numba" else _subset_fill_np
    count = kernel(r, S, ipred, blo, cover, inst.B, k, n, m, V)
    return SubsetUnitDpTable(V, r, S, ipred, blo, cover, inst.B, m, int(count))


# ---------------------------------------------------------------- walk back


def _suffix_cost(tab, b: int, j: int) -> int:
    return int((j - b) * (tab.r[j] + 1) - (tab.S[j] - tab.S[b]))


def reconstruct_unit(inst: Instance, tab: UnitDpTable, a: int, j: int | None = None) -> list[Batch]:
    jobs = inst.jobs
    j = inst.n if j is None else j
    batches: list[Batch] = []
    while j > 0:
        target = int(tab.values[a, j])
        if tab.distinct_releases_prefix[j] <= a:
            groups: dict[int, list[int]] = {}
            for u in range(j):
                groups.setdefault(jobs[u].release, []).append(jobs[u].id)
            batches.extend(Batch(t, ids) for t, ids in groups.items())
            break
        lo = max(j - tab.B, int(tab.blo[j]))
        for b in range(lo, int(tab.ipred[j]) + 1):
            prev = int(tab.values[a - 1, b])
            if prev < INF_I64 and prev + _suffix_cost(tab, b, j) == target:
                break
        else:  # pragma: no cover - table corruption
            raise AssertionError(f"no predecessor for state ({a}, {j})")
        batches.append(Batch(int(tab.r[j]), [jobs[u].id for u in range(b, j)]))
        j, a = b, a - 1
    return batches


def reconstruct_subset(inst: Instance, tab: SubsetUnitDpTable, a: int, j: int, q: int) -> list[Batch]:
    jobs = inst.jobs
    batches: list[Batch] = []
    while q > 0:
        target = int(tab.values[a, j, q])
        if tab.cover[j, q] <= a:
            groups: dict[int, list[int]] = {}
            for u in range(j):
                groups.setdefault(jobs[u].release, []).append(jobs[u].id)
            need = q
            for t, ids in sorted(groups.items(), key=lambda kv: (-len(kv[1]), kv[0])):
                take = ids[:need]
                batches.append(Batch(t, take))
                need -= len(take)
                if need == 0:
                    break
            break
        if q <= j - 1 and int(tab.values[a, j - 1, q]) == target:
            j -= 1
            continue
        lo = max(j - tab.B, j - q, int(tab.blo[j]))
        for b in range(lo, int(tab.ipred[j]) + 1):
            prev = int(tab.values[a - 1, b, q - (j - b)])
            if prev < INF_I64 and prev + _suffix_cost(tab, b, j) == target:
                break
        else:  # pragma: no cover
            raise AssertionError(f"no predecessor for state ({a}, {j}, {q})")
        batches.append(Batch(int(tab.r[j]), [jobs[u].id for u in range(b, j)]))
        q -= j - b
        j, a = b, a - 1
    return batches


# ---------------------------------------------------------------- solvers


def solve_unit_agreeable(inst: Instance, backend: str | None = None) -> SolveOutcome:
    """Minimum-flow schedule of all jobs; ``inst`` must already be compatible."""
    _check_preconditions(inst)
    if inst.m is not None and inst.m < inst.n:
        raise PreconditionError("m < n: use solve_unit_agreeable_subset", check="full_completion",
                                fallback="unit-dp subset")
    t0 = time.perf_counter()
    tab = fill_unit_table(inst, backend=backend)
    value = tab.value(inst.k, inst.n)
    result = Infeasible()
    if value is not INFINITY:
        result = Schedule.from_batches(inst, reconstruct_unit(inst, tab, inst.k))
    return SolveOutcome(
        result=result, algorithm="unit-dp", opt_value=value,
        stats=_stats(tab.values.size, tab.transitions, t0, backend),
    )


def solve_unit_agreeable_subset(inst: Instance, backend: str | None = None) -> SolveOutcome:
    """Best ``m``-subset schedule; ``m`` defaults to ``n``."""
    _check_preconditions(inst)
    m = inst.target
    t0 = time.perf_counter()
    tab = fill_subset_table(inst, m, backend=backend)
    value = tab.value(inst.k, inst.n, m)
    result = Infeasible()
    if value is not INFINITY:
        result = Schedule.from_batches(inst, reconstruct_subset(inst, tab, inst.k, inst.n, m))
    return SolveOutcome(
        result=result, algorithm="unit-dp-subset", opt_value=value,
        stats=_stats(tab.values.size, tab.transitions, t0, backend),
    )


def _stats(size: int, transitions: int, t0: float, backend: str | None) -> dict:
    return {
        "table_entries": int(size),
        "transitions": int(transitions),
        "backend": _accel.resolve(backend),
        "wall_time": time.perf_counter() - t0,
    }
