import pytest
from hypothesis import given

from flowbatch.baselines import brute_force_oracle, lazy_activation
from flowbatch.core import INFINITY, Instance, InstanceError, PreconditionError
from flowbatch.pareto import FrontierError, FrontierPoint, check_frontier, sweep
from flowbatch.preprocess import check_agreeable
from flowbatch.solve import solve

from conftest import instances


def flows(points):
    return [pt.flow for pt in points]


def test_two_jobs():
    inst = Instance.from_pairs([(0, 5), (2, 5)], B=2, k=1)
    assert flows(sweep(inst, 1, 2, "unit-dp")) == [4, 2]
    assert [brute_force_oracle(inst.replace(k=k)).flow for k in (1, 2)] == [4, 2]


def test_pathology_flat():
    inst = Instance.from_pairs([(0, 10)] * 3, B=3, k=1)
    assert flows(sweep(inst, 1, 3, "unit-dp")) == [3, 3, 3]


@pytest.mark.parametrize("algo", ["unit-dp", "uniform-dp", "arbitrary-dp", "oracle"])
def test_single_point_equals_solve(algo):
    inst = Instance.from_pairs([(0, 4), (1, 4), (1, 5), (3, 6)], B=2, k=2)
    (pt,) = sweep(inst, 2, 2, algo)
    out = solve(inst, algo)
    assert pt.k == 2 and pt.flow == out.flow and pt.batches_used == out.result.batches_used


def test_infeasible_prefix_then_feasible():
    inst = Instance.from_pairs([(0, 1), (2, 3), (4, 5)], B=1, k=0)
    pts = sweep(inst, 0, 4, "unit-dp")
    assert [pt.feasible for pt in pts] == [False, False, False, True, True]
    assert pts[0].flow is INFINITY and pts[0].batches_used == 0


def test_reuse_table_matches_independent():
    from flowbatch.gen import agreeable_random
    inst = agreeable_random(40, 3, 1, 30, seed=11)
    a = sweep(inst, 0, 25, "unit-dp")
    b = sweep(inst, 0, 25, "unit-dp", reuse_table=True)
    assert a == b


def test_bad_range_and_preconditions():
    inst = Instance.from_pairs([(0, 3), (1, 2)], B=1, k=1)
    with pytest.raises(InstanceError):
        sweep(inst, 3, 2, "arbitrary-dp")
    with pytest.raises(PreconditionError):
        sweep(inst, 1, 2, "unit-dp")
    with pytest.raises(PreconditionError):
        sweep(inst, 1, 2, "unit-dp", reuse_table=True)


def test_check_frontier_rejects():
    up = [FrontierPoint(1, 3, 1, "x"), FrontierPoint(2, 4, 1, "x")]
    with pytest.raises(FrontierError):
        check_frontier(up)
    lost = [FrontierPoint(1, 3, 1, "x"), FrontierPoint(2, INFINITY, 0, "x")]
    with pytest.raises(FrontierError):
        check_frontier(lost)


@given(instances(p_values=(1,), n_max=6, k_max=0))
def test_threshold_is_lazy_slot_count(inst):
    algo = "unit-dp" if check_agreeable(inst) else "arbitrary-dp"
    pts = sweep(inst, 0, inst.n, algo, workers=1)
    slots = lazy_activation(inst.replace(k=inst.n)).stats["slots_needed"]
    first = next((pt.k for pt in pts if pt.feasible), None)
    assert first == slots
