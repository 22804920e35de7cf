"""Random corpus runs of every applicable solver against the oracle."""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import OracleConfig, OracleLimitError, brute_force_oracle
from .core import INFINITY, Instance, InstanceError
from .gen import agreeable_random, nonagreeable_random
from .preprocess import check_agreeable
from .solve import applicable, solve

SOLVERS = ("unit-dp", "uniform-dp", "arbitrary-dp", "unit-dp-subset", "uniform-dp-subset", "lazy")


@dataclass(frozen=True)
class CorpusSpec:
    count: int = 1000
    n_max: int = 6
    horizon_max: int = 10
    B_max: int = 3
    k_max: int = 4
    p_set: tuple[int, ...] = (1, 2)
    seed: int = 0

    def check(self, config: OracleConfig) -> None:
        if self.count < 0 or self.n_max < 1 or self.B_max < 1 or self.k_max < 0:
            raise InstanceError("count, k_max >= 0 and n_max, B_max >= 1 required")
        if not self.p_set or min(self.p_set) < 1:
            raise InstanceError("p_set must hold positive lengths")
        if self.n_max > config.max_jobs or self.horizon_max > config.max_horizon:
            raise InstanceError(f"corpus exceeds oracle limits (n <= {config.max_jobs}, "
                                f"horizon <= {config.max_horizon})")
        if self.horizon_max < max(self.p_set):
            raise InstanceError("horizon_max must be at least max(p_set)")


@dataclass
class Mismatch:
    index: int
    solver: str
    got: object
    expected: object
    instance: Instance


@dataclass
class CrosscheckReport:
    instances: int = 0
    agreeable: int = 0
    checks: dict[str, int] = field(default_factory=dict)
    skipped: dict[str, int] = field(default_factory=dict)
    timings_us: dict[str, list[int]] = field(default_factory=dict)
    mismatches: list[Mismatch] = field(default_factory=list)

    def percentiles(self) -> dict[str, dict[str, int]]:
        out = {}
        for name, values in sorted(self.timings_us.items()):
            arr = np.asarray(values)
            out[name] = {f"p{q}": int(np.percentile(arr, q)) for q in (50, 90, 99)}
            out[name]["max"] = int(arr.max())
        return out

    def lines(self) -> list[str]:
        rows = [f"instances: {self.instances} ({self.agreeable} agreeable)"]
        for name in SOLVERS + ("oracle",):
            if name in self.checks or name in self.skipped:
                rows.append(f"{name}: checked {self.checks.get(name, 0)}, "
                            f"skipped {self.skipped.get(name, 0)}")
        for name, pct in self.percentiles().items():
            rows.append(f"time {name} us: " + " ".join(f"{k}={v}" for k, v in pct.items()))
        for mm in self.mismatches:
            rows.append(f"MISMATCH #{mm.index} {mm.solver}: got {mm.got}, oracle {mm.expected}")
        rows.append(f"mismatches: {len(self.mismatches)}")
        return rows


def draw(spec: CorpusSpec, index: int) -> Instance:
    """Instance ``index`` of the corpus; independent of every other index."""
    rng = np.random.default_rng([spec.seed, index])
    n = int(rng.integers(1, spec.n_max + 1))
    p = int(rng.choice(spec.p_set))
    B = int(rng.integers(1, spec.B_max + 1))
    k = int(rng.integers(0, spec.k_max + 1))
    horizon = int(rng.integers(p, spec.horizon_max + 1))
    seed = int(rng.integers(0, 2**63 - 1))
    if rng.random() < 0.5 and n > 1:
        try:
            return nonagreeable_random(n, B, p, horizon, seed, k=k)
        except InstanceError:
            pass  # too tight to break agreeability
    return agreeable_random(n, B, p, horizon, seed, k=k)


def _timed(fn):
    t0 = time.perf_counter()
    value = fn()
    return value, int((time.perf_counter() - t0) * 1e6)


def _check_one(spec: CorpusSpec, index: int, config: OracleConfig, backend: str | None):
    inst = draw(spec, index)
    rng = np.random.default_rng([spec.seed, index, 1])
    sub = inst.replace(m=int(rng.integers(0, inst.n + 1)))
    results, skipped, timings = [], [], []
    full, t = _timed(lambda: brute_force_oracle(inst, config).flow)
    timings.append(("oracle", t))
    part, t = _timed(lambda: brute_force_oracle(sub, config).flow)
    timings.append(("oracle", t))
    plan = [("unit-dp", inst, "unit-dp", full), ("uniform-dp", inst, "uniform-dp", full),
            ("arbitrary-dp", inst, "arbitrary-dp", full),
            ("unit-dp-subset", sub, "unit-dp", part), ("uniform-dp-subset", sub, "uniform-dp", part)]
    for name, target, algo, expected in plan:
        if not applicable(target, algo):
            skipped.append(name)
            continue
        out, t = _timed(lambda: solve(target, algo, backend=backend))
        timings.append((name, t))
        results.append((name, out.flow, expected, target))
    # Lazy Activation is slot-optimal, not flow-optimal: compare feasibility only.
    if applicable(inst, "lazy"):
        out, t = _timed(lambda: solve(inst, "lazy"))
        timings.append(("lazy", t))
        results.append(("lazy", out.feasible, full is not INFINITY, inst))
    else:
        skipped.append("lazy")
    return index, inst, check_agreeable(inst), results, skipped, timings


def run(spec: CorpusSpec, *, config: OracleConfig | None = None, backend: str | None = None,
        workers: int | None = 1) -> CrosscheckReport:
    config = config or OracleConfig()
    spec.check(config)
    report = CrosscheckReport()
    job = lambda i: _check_one(spec, i, config, backend)  # noqa: E731
    if workers == 1:
        rows = map(job, range(spec.count))
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        rows = pool.map(job, range(spec.count))
    try:
        for index, inst, agreeable, results, skipped, timings in rows:
            report.instances += 1
            report.agreeable += agreeable
            for name in skipped:
                report.skipped[name] = report.skipped.get(name, 0) + 1
            for name, t in timings:
                report.timings_us.setdefault(name, []).append(t)
            report.checks["oracle"] = report.checks.get("oracle", 0) + 2
            for name, got, expected, target in results:
                report.checks[name] = report.checks.get(name, 0) + 1
                if got != expected:
                    report.mismatches.append(Mismatch(index, name, got, expected, target))
    except OracleLimitError as exc:  # pragma: no cover - guarded by spec.check
        raise InstanceError(str(exc)) from exc
    finally:
        if workers != 1:
            pool.shutdown()
    return report
