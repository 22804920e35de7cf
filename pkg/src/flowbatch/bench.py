"""Wall-clock timing of one solver under each kernel backend."""
from __future__ import annotations

import time
from dataclasses import dataclass

from . import _accel
from .core import Instance
from .solve import solve

HAVE_NUMBA = _accel.numba is not None


@dataclass(frozen=True)
class BenchRow:
    algo: str
    backend: str
    n: int
    best_us: int
    median_us: int
    flow: object
    transitions: int


def time_solver(inst: Instance, algo: str, backend: str, repeat: int = 3) -> BenchRow:
    """Best and median of ``repeat`` runs after one untimed warm-up (JIT compile)."""
    out = solve(inst, algo, backend=backend)
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = solve(inst, algo, backend=backend)
        samples.append(int((time.perf_counter() - t0) * 1e6))
    samples.sort()
    return BenchRow(algo, backend, inst.n, samples[0], samples[len(samples) // 2], out.flow,
                    int(out.stats.get("transitions", 0)))


def compare_backends(inst: Instance, algo: str, repeat: int = 3) -> list[BenchRow]:
    backends = [b for b in _accel.BACKENDS if b != "numba" or HAVE_NUMBA]
    rows = [time_solver(inst, algo, b, repeat) for b in backends]
    flows = {row.flow for row in rows}
    if len(flows) != 1:
        raise AssertionError(f"backends disagree on {algo}: {rows}")
    return rows
