import pytest

from flowbatch.core import Instance, PreconditionError
from flowbatch.solve import ALGORITHMS, applicable, require, solve


def test_unit_bridge():
    inst = Instance.from_pairs([(0, 3), (0, 3)], B=1, k=2)
    out = solve(inst, "unit-dp")
    assert out.opt_value == 2 and out.shift_total == 1 and out.flow == 3
    assert out.stats["validated"]


def test_unit_preprocess_infeasible():
    out = solve(Instance.from_pairs([(1, 2), (1, 2)], B=1, k=2), "unit-dp")
    assert not out.feasible and out.stats["preprocess"] == "infeasible"


def test_overfull_subset_is_routed():
    inst = Instance.from_pairs([(0, 2), (0, 2), (1, 3)], B=1, k=2, m=2)
    out = solve(inst, "unit-dp")
    assert out.flow == 2 and out.stats["routed"] == "uniform-dp-subset"
    compat = Instance.from_pairs([(0, 2), (1, 2), (1, 3)], B=2, k=2, m=2)
    assert "routed" not in solve(compat, "unit-dp").stats


@pytest.mark.parametrize("algo, check", [
    ("unit-dp", "unit_length"), ("lazy", "unit_length"), ("uniform-dp", "check_agreeable"),
])
def test_preconditions_name_the_check(algo, check):
    inst = Instance.from_pairs([(0, 6), (1, 4)], p=2, B=1, k=2)
    with pytest.raises(PreconditionError) as err:
        solve(inst, algo)
    assert err.value.check == check
    assert not applicable(inst, algo)


def test_full_completion_only():
    inst = Instance.from_pairs([(0, 6), (1, 4)], B=1, k=2, m=1)
    for algo in ("arbitrary-dp", "lazy", "lazy-reverse"):
        with pytest.raises(PreconditionError):
            require(inst, algo)
    assert applicable(inst, "oracle") and applicable(inst, "uniform-dp") is False


def test_unknown_algorithm():
    with pytest.raises(ValueError):
        solve(Instance(p=1, B=1, k=0, jobs=()), "simplex")
    assert set(ALGORITHMS) == {"unit-dp", "uniform-dp", "arbitrary-dp", "lazy", "lazy-reverse", "oracle"}
