"""Numba vs numpy kernels across the three dynamic programs.

    python benchmarks/bench_backends.py [--repeat N] [--quick]

Prints one CSV row per (case, backend); every case also asserts the two
backends return the same flow.
"""
import argparse
import sys

from flowbatch.bench import compare_backends
from flowbatch.gen import agreeable_random, nonagreeable_random

CASES = [
    ("unit-dp", lambda: agreeable_random(5_000, 20, 1, 10_000, seed=1, k=500)),
    ("unit-dp", lambda: agreeable_random(50_000, 100, 1, 100_000, seed=2, k=500)),
    ("uniform-dp", lambda: agreeable_random(20, 5, 2, 60, seed=3, k=8)),
    ("uniform-dp", lambda: agreeable_random(40, 5, 3, 150, seed=4, k=10)),
    ("arbitrary-dp", lambda: nonagreeable_random(30, 4, 1, 60, seed=5, k=6)),
    ("arbitrary-dp", lambda: nonagreeable_random(8, 3, 2, 24, seed=6, k=4)),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="skip the largest case of each solver")
    args = ap.parse_args(argv)
    print("algo,n,backend,best_us,median_us,speedup,flow")
    seen = set()
    for algo, make in CASES:
        if args.quick and algo in seen:
            continue
        seen.add(algo)
        rows = compare_backends(make(), algo, repeat=args.repeat)
        base = max(r.best_us for r in rows if r.backend == "numpy")
        for r in rows:
            speed = base / max(r.best_us, 1)
            print(f"{algo},{r.n},{r.backend},{r.best_us},{r.median_us},{speed:.1f}x,{r.flow}")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
