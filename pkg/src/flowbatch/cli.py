"""``flowbatch`` command line.

Exit codes: 0 feasible / success, 1 infeasible (or failed verification,
crosscheck mismatches), 2 unreadable or invalid input, 3 solver precondition
violated.
"""
from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import sys

from . import io
from .baselines import OracleLimitError
from .bench import compare_backends
from .core import InstanceError, PreconditionError, validate_schedule
from .crosscheck import CorpusSpec, run
from .gen import KINDS, generate
from .pareto import sweep
from .solve import ALGORITHMS, solve

EXIT_OK, EXIT_INFEASIBLE, EXIT_PARSE, EXIT_PRECONDITION = 0, 1, 2, 3


def _emit(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        io.write_text_atomic(path, text)


def _precondition(exc: PreconditionError) -> int:
    hint = f"; try --algo {exc.fallback}" if exc.fallback else ""
    print(f"precondition failed [{exc.check}]: {exc}{hint}", file=sys.stderr)
    return EXIT_PRECONDITION


def cmd_solve(args) -> int:
    inst = io.read_instance(args.input)
    try:
        out = solve(inst, args.algo, backend=args.backend)
    except PreconditionError as exc:
        return _precondition(exc)
    _emit(args.output, io.dumps_schedule(out))
    if out.feasible:
        extra = f" (dp value {out.opt_value} + shift {out.shift_total})" if out.shift_total else ""
        print(f"{args.algo}: flow {out.flow}, {out.result.batches_used} batches{extra}",
              file=sys.stderr)
        return EXIT_OK
    print(f"{args.algo}: infeasible with k={inst.k}", file=sys.stderr)
    return EXIT_INFEASIBLE


def cmd_sweep(args) -> int:
    inst = io.read_instance(args.input)
    try:
        points = sweep(inst, args.k_min, args.k_max, args.algo, backend=args.backend,
                       workers=args.workers, reuse_table=args.reuse_table)
    except PreconditionError as exc:
        return _precondition(exc)
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "flow", "batches_used", "feasible"])
    for pt in points:
        writer.writerow([pt.k, pt.flow if pt.feasible else "", pt.batches_used,
                         "true" if pt.feasible else "false"])
    _emit(args.output, buf.getvalue())
    return EXIT_OK


def cmd_gen(args) -> int:
    inst = generate(args.kind, n=args.n, B=args.B, p=args.p, horizon=args.horizon,
                    seed=args.seed, k=args.k, d=args.d, m=args.m)
    _emit(args.output, io.dumps_instance(inst))
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = io.read_instance(args.instance)
    feasible, sched = io.read_schedule(args.schedule)
    if not feasible:
        print("schedule file records an infeasible outcome; nothing to verify")
        return EXIT_INFEASIBLE
    report = validate_schedule(inst, sched)
    for v in report.violations:
        print(f"violation: {v}")
    print(f"{'ok' if report.ok else 'INVALID'}: recomputed flow {report.flow}")
    return EXIT_OK if report.ok else EXIT_INFEASIBLE


def cmd_crosscheck(args) -> int:
    spec = CorpusSpec(count=args.count, n_max=args.n_max, horizon_max=args.horizon_max,
                      B_max=args.B_max, k_max=args.k_max, p_set=tuple(args.p_set), seed=args.seed)
    report = run(spec, backend=args.backend, workers=args.workers)
    for line in report.lines():
        print(line)
    if args.json:
        doc = {"instances": report.instances, "checks": report.checks, "skipped": report.skipped,
               "timings_us": report.percentiles(), "mismatches": [
                   {"index": m.index, "solver": m.solver, "got": str(m.got),
                    "expected": str(m.expected), "instance": io.instance_document(m.instance)}
                   for m in report.mismatches]}
        io.write_text_atomic(args.json, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK if not report.mismatches else EXIT_INFEASIBLE


def cmd_bench(args) -> int:
    inst = io.read_instance(args.input) if args.input else generate(
        args.kind, n=args.n, B=args.B, p=args.p, horizon=args.horizon, seed=args.seed, k=args.k)
    try:
        rows = compare_backends(inst, args.algo, repeat=args.repeat)
    except PreconditionError as exc:
        return _precondition(exc)
    print("algo,backend,n,best_us,median_us,flow,transitions")
    for r in rows:
        print(f"{r.algo},{r.backend},{r.n},{r.best_us},{r.median_us},{r.flow},{r.transitions}")
    return EXIT_OK


def _p_set(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 already; keep the message short
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="flowbatch", description="Minimum flow time batch scheduling under a batch budget.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def backend_flag(p):
        p.add_argument("--backend", choices=("numba", "numpy"), default=None,
                       help="kernel backend (default: FLOWBATCH_BACKEND or numba)")

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("input")
    s.add_argument("--algo", choices=ALGORITHMS, required=True)
    s.add_argument("-o", "--output", help="schedule file (default stdout)")
    backend_flag(s)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("sweep", help="flow time for every budget in a range, as CSV")
    s.add_argument("input")
    s.add_argument("--k-min", type=int, required=True)
    s.add_argument("--k-max", type=int, required=True)
    s.add_argument("--algo", choices=ALGORITHMS, required=True)
    s.add_argument("-o", "--output", help="CSV file (default stdout)")
    s.add_argument("--workers", type=int, default=None)
    s.add_argument("--reuse-table", action="store_true",
                   help="unit-dp only: fill one table at k-max for all budgets")
    backend_flag(s)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("gen", help="write a generated instance")
    s.add_argument("kind", choices=KINDS)
    s.add_argument("--n", type=int, default=6)
    s.add_argument("--B", type=int, default=2)
    s.add_argument("--p", type=int, default=1)
    s.add_argument("--horizon", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--d", type=int, default=None, help="pathology deadline (default: horizon)")
    s.add_argument("--m", type=int, default=None)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("verify", help="check a schedule file against an instance")
    s.add_argument("instance")
    s.add_argument("schedule")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("crosscheck", help="random corpus against the exhaustive oracle")
    s.add_argument("--count", type=int, default=1000)
    s.add_argument("--n-max", type=int, default=6)
    s.add_argument("--horizon-max", type=int, default=10)
    s.add_argument("--B-max", type=int, default=3)
    s.add_argument("--k-max", type=int, default=4)
    s.add_argument("--p-set", type=_p_set, default=[1, 2])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--json", help="also write a JSON report here")
    backend_flag(s)
    s.set_defaults(func=cmd_crosscheck)

    s = sub.add_parser("bench", help="time a solver under both kernel backends")
    s.add_argument("--input")
    s.add_argument("--algo", choices=ALGORITHMS, default="unit-dp")
    s.add_argument("--kind", choices=KINDS, default="agreeable-random")
    s.add_argument("--n", type=int, default=2000)
    s.add_argument("--B", type=int, default=10)
    s.add_argument("--p", type=int, default=1)
    s.add_argument("--horizon", type=int, default=4000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--k", type=int, default=400)
    s.add_argument("--repeat", type=int, default=3)
    s.set_defaults(func=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as exc:
        return _precondition(exc)
    except (InstanceError, OracleLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
