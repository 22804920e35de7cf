"""The eight acceptance criteria, one test each, at their stated sizes and tolerances."""
import time

import numpy as np
import pytest

from flowbatch import io
from flowbatch.baselines import brute_force_oracle, lazy_activation
from flowbatch.cli import main
from flowbatch.core import INFINITY, Instance
from flowbatch.crosscheck import CorpusSpec, run
from flowbatch.dp_arbitrary import fill_arbitrary_table
from flowbatch.dp_uniform import fill_uniform_table, solve_uniform_agreeable, solve_uniform_agreeable_subset
from flowbatch.dp_unit import fill_unit_table, solve_unit_agreeable, solve_unit_agreeable_subset
from flowbatch.gen import agreeable_random, la_pathology, la_reverse_pathology, nonagreeable_random
from flowbatch.pareto import sweep
from flowbatch.preprocess import check_agreeable, make_b_capacity_compatible
from flowbatch.solve import solve


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    # compile (or load cached) numba kernels so timings measure solving only
    solve(agreeable_random(20, 2, 1, 30, seed=0, k=12), "unit-dp")
    solve(agreeable_random(8, 2, 2, 30, seed=0, k=5).replace(m=4), "uniform-dp")
    solve(agreeable_random(8, 2, 2, 30, seed=0, k=5), "uniform-dp")
    solve(agreeable_random(8, 2, 2, 30, seed=0, k=5), "arbitrary-dp")
    solve(agreeable_random(8, 2, 1, 30, seed=0, k=5).replace(m=4), "unit-dp")


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_1_lazy_pathology(criterion):
    with criterion(1, "LA pathology: lazy 30 vs unit-dp 3") as note:
        inst = la_pathology(3, 10)
        lazy, t1 = timed(lambda: solve(inst, "lazy"))
        opt, t2 = timed(lambda: solve(inst.replace(k=1), "unit-dp"))
        assert lazy.flow == 3 * 10
        assert opt.flow == 3
        assert t1 < 1 and t2 < 1
        note(f"{lazy.flow} vs {opt.flow} in {t1 + t2:.3f}s")


def test_2_reverse_pathology(criterion):
    with criterion(2, "reverse LA pathology: lazy-reverse 21 vs unit-dp 3") as note:
        inst = la_reverse_pathology(3, 10)
        assert [(j.release, j.deadline) for j in inst.jobs] == [(0, 10), (0, 10), (9, 10)]
        assert inst.k == 2
        lazy, t1 = timed(lambda: solve(inst, "lazy-reverse"))
        opt, t2 = timed(lambda: solve(inst, "unit-dp"))
        assert lazy.flow == 10 * (3 - 1) + 1
        assert opt.flow == 3
        assert t1 < 1 and t2 < 1
        note(f"{lazy.flow} vs {opt.flow} in {t1 + t2:.3f}s")


def test_3_oracle_equivalence(criterion):
    with criterion(3, "oracle equivalence, 1000 instances") as note:
        spec = CorpusSpec(count=1000, n_max=6, horizon_max=10, B_max=3, k_max=4, p_set=(1, 2), seed=2024)
        report, elapsed = timed(lambda: run(spec))
        assert report.instances == 1000
        assert 0 < report.agreeable < 1000, "corpus must mix agreeable and non-agreeable"
        for name in ("unit-dp", "uniform-dp", "arbitrary-dp", "unit-dp-subset", "uniform-dp-subset"):
            assert report.checks.get(name, 0) > 0, f"{name} never exercised"
        assert not report.mismatches, report.lines()[-5:]
        assert elapsed < 600
        note(f"{sum(report.checks.values())} comparisons, 0 mismatches, {elapsed:.1f}s")


def test_4_cross_solver_consistency(criterion, tmp_path):
    with criterion(4, "unit-dp = uniform-dp = arbitrary-dp on agreeable unit corpus") as note:
        rng = np.random.default_rng(44)
        failures, checked = [], 0
        src, out = tmp_path / "inst.json", tmp_path / "sched.json"
        for i in range(500):
            n = int(rng.integers(1, 9))
            inst = agreeable_random(n, int(rng.integers(1, 4)), 1, int(rng.integers(2, 17)),
                                    seed=int(rng.integers(2**62)), k=int(rng.integers(0, 6)))
            io.write_instance(src, inst)
            values = {}
            for algo in ("unit-dp", "uniform-dp", "arbitrary-dp"):
                res = solve(inst, algo)
                values[algo] = res.flow
                if res.feasible:
                    if res.flow != res.opt_value + res.shift_total:
                        failures.append((i, algo, "bridge"))
                    io.write_schedule(out, res)
                    if main(["verify", str(src), str(out)]) != 0:
                        failures.append((i, algo, "verify"))
                    checked += 1
            if len(set(values.values())) != 1:
                failures.append((i, values))
        assert not failures, failures[:5]
        note(f"500 instances, {checked} schedules verified")


def test_5_subset_degeneration(criterion):
    with criterion(5, "subset solvers with m = n equal full solvers") as note:
        rng = np.random.default_rng(55)
        bad = []
        unit_checked = 0
        for i in range(200):
            p = int(rng.choice([1, 2, 3]))
            n = int(rng.integers(0, 9))
            inst = agreeable_random(n, int(rng.integers(1, 4)), p, int(rng.integers(p, 20)),
                                    seed=int(rng.integers(2**62)), k=int(rng.integers(0, 6)))
            full = solve_uniform_agreeable(inst)
            sub = solve_uniform_agreeable_subset(inst.replace(m=inst.n))
            if full.opt_value != sub.opt_value or full.flow != sub.flow:
                bad.append((i, "uniform", full.flow, sub.flow))
            if p == 1:
                pre = make_b_capacity_compatible(inst)
                if not pre.infeasible:
                    work = pre.transformed
                    a = solve_unit_agreeable(work)
                    b = solve_unit_agreeable_subset(work.replace(m=work.n))
                    unit_checked += 1
                    if a.opt_value != b.opt_value:
                        bad.append((i, "unit", a.opt_value, b.opt_value))
        assert not bad, bad[:5]
        assert unit_checked > 20
        note(f"200 uniform pairs, {unit_checked} unit pairs")


def test_6_monotonicity_and_thresholds(criterion):
    with criterion(6, "sweep monotone, feasibility upward-closed, threshold = LA slots") as note:
        rng = np.random.default_rng(66)
        violations, thresholds = [], 0
        for i in range(200):
            p = int(rng.choice([1, 2]))
            n = int(rng.integers(1, 8))
            H = int(rng.integers(p, 14))
            seed = int(rng.integers(2**62))
            ag = rng.random() < 0.5
            try:
                inst = (agreeable_random if ag else nonagreeable_random)(n, int(rng.integers(1, 4)), p, H, seed)
            except Exception:
                inst = agreeable_random(n, int(rng.integers(1, 4)), p, H, seed)
            if check_agreeable(inst):
                algo = "unit-dp" if p == 1 else "uniform-dp"
            else:
                algo = "arbitrary-dp"
            pts = sweep(inst, 0, n, algo, check=False)
            for a, b in zip(pts, pts[1:]):
                if b.flow > a.flow or (a.feasible and not b.feasible):
                    violations.append((i, a, b))
            if p == 1:
                first = next((pt.k for pt in pts if pt.feasible), None)
                slots = lazy_activation(inst.replace(k=n)).stats["slots_needed"]
                thresholds += 1
                if first != slots:
                    violations.append((i, "threshold", first, slots))
        assert not violations, violations[:5]
        note(f"200 sweeps, {thresholds} thresholds")


def test_7_complexity(criterion):
    with criterion(7, "complexity smoke tests") as note:
        rows = []

        unit = agreeable_random(50_000, 100, 1, 100_000, seed=7, k=500)
        out, t = timed(lambda: solve(unit, "unit-dp"))
        assert out.feasible and t < 5, t
        assert out.stats["transitions"] <= unit.B * unit.k * unit.n
        rows.append(f"unit {t:.2f}s")

        # a wide horizon keeps the r_j + p*u candidates distinct, so |T| is near n(n + 1)
        uni = agreeable_random(20, 5, 2, 2000, seed=7, k=8)
        out, t = timed(lambda: solve(uni, "uniform-dp"))
        assert t < 10, t
        assert out.stats["transitions"] <= uni.B * uni.k * uni.n ** 5
        rows.append(f"uniform {t:.2f}s |T|={out.stats['interesting_times']}")

        # n > k * B makes this instance infeasible, but the table is filled in full regardless
        arb_unit = nonagreeable_random(30, 4, 1, 2000, seed=7, k=6)
        out, t = timed(lambda: solve(arb_unit, "arbitrary-dp"))
        assert t < 10, t
        assert out.stats["release_only"]
        n = arb_unit.n
        assert out.stats["transitions"] <= 4 * arb_unit.B * arb_unit.k ** 2 * n ** 4
        rows.append(f"arbitrary-unit {t:.2f}s")

        arb = nonagreeable_random(8, 3, 2, 2000, seed=7, k=4)
        out, t = timed(lambda: solve(arb, "arbitrary-dp"))
        assert t < 30, t
        assert out.stats["transitions"] <= 4 * arb.B * arb.k ** 2 * arb.n ** 7
        rows.append(f"arbitrary-uniform {t:.2f}s |T|={out.stats['candidate_times']}")

        # the counters follow the stated growth rates, not just a loose bound
        for a, b in [(4_000, 8_000)]:
            ta = fill_unit_table(make_b_capacity_compatible(agreeable_random(a, 10, 1, 2 * a, seed=1, k=200)).transformed)
            tb = fill_unit_table(make_b_capacity_compatible(agreeable_random(b, 10, 1, 2 * b, seed=1, k=200)).transformed)
            assert tb.transitions <= 3 * (b / a) * ta.transitions
        small = fill_arbitrary_table(make_b_capacity_compatible(
            nonagreeable_random(10, 3, 1, 20, seed=2, k=4)).transformed, release_only=True)
        assert small.transitions <= 4 * 3 * 16 * 10 ** 4
        tab = fill_uniform_table(uni)
        assert tab.transitions <= uni.B * uni.k * uni.n * len(tab.times)
        note(", ".join(rows))


def test_8_preprocessing_bridge(criterion):
    with criterion(8, "preprocessing bridge and infeasibility equivalence") as note:
        rng = np.random.default_rng(88)
        violations, feasible, infeasible = [], 0, 0
        for i in range(300):
            n = int(rng.integers(1, 7))
            B = int(rng.integers(1, 4))
            H = int(rng.integers(2, 11))
            seed = int(rng.integers(2**62))
            ag = rng.random() < 0.5
            try:
                inst = (agreeable_random if ag else nonagreeable_random)(n, B, 1, H, seed, k=n)
            except Exception:
                inst = agreeable_random(n, B, 1, H, seed, k=n)
            algo = "unit-dp" if check_agreeable(inst) else "arbitrary-dp"
            out = solve(inst, algo)
            pre = make_b_capacity_compatible(inst)
            oracle = brute_force_oracle(inst)
            if pre.infeasible != (oracle.flow is INFINITY):
                violations.append((i, "infeasibility", pre.infeasible, oracle.flow))
            if out.feasible:
                feasible += 1
                if out.flow != out.opt_value + out.shift_total or out.shift_total != pre.shift_total:
                    violations.append((i, "bridge", out.flow, out.opt_value, out.shift_total))
                if out.flow != oracle.flow:
                    violations.append((i, "value", out.flow, oracle.flow))
            else:
                infeasible += 1
        assert not violations, violations[:5]
        assert feasible > 0 and infeasible > 0
        note(f"{feasible} feasible, {infeasible} infeasible")
