"""Flow time as a function of the batch budget."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .core import INFINITY, Instance, InstanceError, Schedule, _Infinity
from .dp_unit import fill_unit_table, reconstruct_unit
from .preprocess import make_b_capacity_compatible
from .solve import require, solve


@dataclass(frozen=True)
class FrontierPoint:
    k: int
    flow: int | _Infinity
    batches_used: int
    algorithm: str

    @property
    def feasible(self) -> bool:
        return self.flow is not INFINITY


class FrontierError(AssertionError):
    """A sweep produced a frontier that is not monotone in ``k``."""


def check_frontier(points: list[FrontierPoint]) -> None:
    seen_feasible = False
    for prev, cur in zip(points, points[1:]):
        if cur.flow > prev.flow:
            raise FrontierError(f"flow rose from {prev.flow} at k={prev.k} to {cur.flow} at k={cur.k}")
    for pt in points:
        if seen_feasible and not pt.feasible:
            raise FrontierError(f"k={pt.k} infeasible after a smaller feasible budget")
        seen_feasible = seen_feasible or pt.feasible


def _point(inst: Instance, k: int, algo: str, backend: str | None) -> FrontierPoint:
    out = solve(inst.replace(k=k), algo, backend=backend)
    used = out.result.batches_used if out.feasible else 0
    return FrontierPoint(k, out.flow, used, algo)


def _unit_fast(inst: Instance, ks: range, backend: str | None) -> list[FrontierPoint]:
    # One table at the largest budget holds the answer for every smaller one.
    if inst.n == 0:
        return [FrontierPoint(k, 0, 0, "unit-dp") for k in ks]
    pre = make_b_capacity_compatible(inst)
    if pre.infeasible:
        return [FrontierPoint(k, INFINITY, 0, "unit-dp") for k in ks]
    work = pre.transformed.replace(k=ks[-1])
    tab = fill_unit_table(work, backend=backend)
    points = []
    for k in ks:
        if tab.value(k, work.n) is INFINITY:
            points.append(FrontierPoint(k, INFINITY, 0, "unit-dp"))
            continue
        sched = Schedule.from_batches(inst.replace(k=k), reconstruct_unit(work, tab, k))
        points.append(FrontierPoint(k, sched.total_flow, sched.batches_used, "unit-dp"))
    return points


def sweep(inst: Instance, k_min: int, k_max: int, algo: str, *, backend: str | None = None,
          workers: int | None = None, reuse_table: bool = False,
          check: bool = True) -> list[FrontierPoint]:
    """One point per budget in ``k_min..k_max``, ordered by ``k``.

    Budgets are solved independently on a thread pool. With
    ``reuse_table=True`` and ``algo="unit-dp"`` (full completion only) a
    single table fill at ``k_max`` serves every budget instead.
    """
    if k_min < 0 or k_min > k_max:
        raise InstanceError(f"need 0 <= k_min <= k_max, got {k_min}..{k_max}")
    ks = range(k_min, k_max + 1)
    if reuse_table and algo == "unit-dp" and inst.target == inst.n:
        require(inst, algo)
        points = _unit_fast(inst, ks, backend)
    elif workers == 1 or len(ks) == 1:
        points = [_point(inst, k, algo, backend) for k in ks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(lambda k: _point(inst, k, algo, backend), ks))
    if check:
        check_frontier(points)
    return points
