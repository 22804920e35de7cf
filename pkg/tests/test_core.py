import pickle

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flowbatch.core import (
    INFINITY,
    Batch,
    Infeasible,
    Instance,
    InstanceError,
    Job,
    Schedule,
    SolveOutcome,
    flow_of_assignment,
    release_prefix_sums,
    validate_schedule,
)
from flowbatch.baselines import brute_force_oracle

from conftest import instances


def la_instance():
    return Instance.from_pairs([(0, 10)] * 3, p=1, B=3, k=1)


class TestInfinity:
    def test_absorbs_addition(self):
        assert INFINITY + 5 is INFINITY
        assert 5 + INFINITY is INFINITY
        assert INFINITY + INFINITY is INFINITY

    def test_orders_above_integers(self):
        assert 10**18 < INFINITY
        assert min(INFINITY, 3) == 3
        assert not INFINITY < INFINITY
        assert INFINITY <= INFINITY

    def test_singleton_survives_pickle(self):
        assert pickle.loads(pickle.dumps(INFINITY)) is INFINITY


class TestInstance:
    def test_sorted_with_original_order(self):
        inst = Instance(p=1, B=1, k=1, jobs=(Job(5, 3, 9), Job(2, 0, 4), Job(7, 0, 2)))
        assert [j.id for j in inst.jobs] == [7, 2, 5]
        assert inst.original_order == (5, 2, 7)

    def test_rejects_short_window_naming_the_job(self):
        with pytest.raises(InstanceError, match="job 1"):
            Instance.from_pairs([(0, 3), (2, 3)], p=2)

    def test_rejects_duplicate_ids(self):
        with pytest.raises(InstanceError, match="unique"):
            Instance(p=1, B=1, k=1, jobs=(Job(0, 0, 2), Job(0, 1, 3)))

    @pytest.mark.parametrize("kw", [dict(p=0), dict(B=0), dict(k=-1), dict(m=3)])
    def test_rejects_bad_parameters(self, kw):
        args = dict(p=1, B=1, k=1, m=None) | kw
        with pytest.raises(InstanceError):
            Instance.from_pairs([(0, 5), (1, 5)], **args)

    def test_rejects_negative_release(self):
        with pytest.raises(InstanceError):
            Instance(p=1, B=1, k=1, jobs=(Job(0, -1, 3),))

    def test_target(self):
        inst = Instance.from_pairs([(0, 5), (1, 5)], m=1)
        assert inst.target == 1 and inst.replace(m=None).target == 2


class TestValidate:
    def test_pathology_optimum(self):
        sched = Schedule.from_batches(la_instance(), [Batch(0, [0, 1, 2])])
        rep = validate_schedule(la_instance(), sched)
        assert rep.ok and rep.flow == 3

    def test_empty(self):
        inst = Instance(p=1, B=1, k=0, jobs=())
        rep = validate_schedule(inst, Schedule((), 0, 0))
        assert rep.ok and rep.flow == 0

    def test_unsynchronized(self):
        inst = Instance.from_pairs([(0, 5), (0, 5)], p=2, B=1, k=2)
        rep = validate_schedule(inst, Schedule.from_batches(inst, [Batch(0, [0]), Batch(1, [1])]))
        assert not rep.ok
        assert any("overlapping/unsynchronized batches" in v for v in rep.violations)

    def test_capacity(self):
        inst = Instance.from_pairs([(0, 5)] * 3, p=1, B=2, k=1)
        rep = validate_schedule(inst, Schedule.from_batches(inst, [Batch(0, [0, 1, 2])]))
        assert any("capacity exceeded" in v for v in rep.violations)

    def test_windows_budget_and_count(self):
        inst = Instance.from_pairs([(2, 4), (0, 3), (0, 9)], p=1, B=1, k=1)
        sched = Schedule.from_batches(inst, [Batch(1, [0]), Batch(5, [1])])
        rep = validate_schedule(inst, sched)
        text = " | ".join(rep.violations)
        assert "release" in text and "deadline" in text and "budget" in text
        assert "expected 3" in text

    def test_lying_flow_is_caught(self):
        inst = la_instance()
        sched = Schedule((Batch(0, [0, 1, 2]),), total_flow=2, batches_used=1)
        rep = validate_schedule(inst, sched)
        assert not rep.ok and rep.flow == 3

    def test_unknown_and_repeated_jobs(self):
        inst = Instance.from_pairs([(0, 5), (0, 5)], p=1, B=2, k=2)
        sched = Schedule((Batch(0, [0, 9]), Batch(1, [0])), 0, 2)
        text = " | ".join(validate_schedule(inst, sched).violations)
        assert "unknown job id 9" in text and "scheduled more than once" in text

    def test_subset_count(self):
        inst = Instance.from_pairs([(0, 5), (0, 5)], p=1, B=2, k=1, m=1)
        ok = Schedule.from_batches(inst, [Batch(0, [1])])
        assert validate_schedule(inst, ok).ok
        both = Schedule.from_batches(inst, [Batch(0, [0, 1])])
        assert not validate_schedule(inst, both).ok


class TestFlowOfAssignment:
    def test_examples(self):
        assert flow_of_assignment(Instance.from_pairs([(0, 10)]), {0: 9}) == 10
        assert flow_of_assignment(Instance.from_pairs([(5, 9)], p=2), {0: 5}) == 2
        two = Instance.from_pairs([(0, 3), (2, 3)], B=2, k=1)
        assert flow_of_assignment(two, {0: 2, 1: 2}) == 4
        assert brute_force_oracle(two).flow == 4

    def test_reports_offender(self):
        inst = Instance.from_pairs([(0, 10), (4, 6)])
        with pytest.raises(InstanceError, match="job 1"):
            flow_of_assignment(inst, {0: 0, 1: 6})
        with pytest.raises(InstanceError, match="job 7"):
            flow_of_assignment(inst, {7: 0})

    @given(st.data())
    def test_order_invariant(self, data):
        inst = data.draw(instances(n_max=6))
        assignment = {j.id: data.draw(st.integers(j.release, j.deadline - inst.p)) for j in inst.jobs}
        keys = data.draw(st.permutations(list(assignment)))
        shuffled = {key: assignment[key] for key in keys}
        assert flow_of_assignment(inst, assignment) == flow_of_assignment(inst, shuffled)
        # every job contributes at least p, exactly p when started at release
        at_release = {j.id: j.release for j in inst.jobs}
        assert flow_of_assignment(inst, at_release) == inst.n * inst.p
        assert flow_of_assignment(inst, assignment) >= inst.n * inst.p


def test_solve_outcome_invariant():
    with pytest.raises(ValueError):
        SolveOutcome(Infeasible(), "x", 3)
    with pytest.raises(ValueError):
        SolveOutcome(Schedule((), 0, 0), "x", INFINITY)
    out = SolveOutcome(Infeasible(), "x", INFINITY)
    assert not out.feasible and out.flow is INFINITY


def test_prefix_sums():
    assert list(release_prefix_sums([1, 1, 4])) == [0, 1, 2, 6]


def test_from_batches_drops_empty_and_sorts():
    inst = Instance.from_pairs([(0, 5), (3, 5)], B=1, k=3)
    sched = Schedule.from_batches(inst, [Batch(3, [1]), Batch(1, []), Batch(0, [0])])
    assert [b.start for b in sched.batches] == [0, 3]
    assert sched.batches_used == 2 and sched.total_flow == 2
