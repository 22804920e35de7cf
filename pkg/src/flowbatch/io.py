"""JSON documents for instances and schedules.

Instance file::

    {"p": 1, "B": 3, "k": 1, "m": 2, "meta": {...},
     "jobs": [{"id": 0, "r": 0, "d": 10}, ...]}

``m`` and ``meta`` are optional. Every numeric field must be a JSON integer.
Jobs are written in their original input order, so ``dumps_instance`` of a
parsed canonical file reproduces it byte for byte.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any

from .core import Batch, Instance, InstanceError, Job, Schedule, SolveOutcome

_INSTANCE_KEYS = {"p", "B", "k", "m", "meta", "jobs"}
_JOB_KEYS = {"id", "r", "d"}


class ParseError(InstanceError):
    """A document is malformed or violates the instance rules."""


def _int(value: Any, where: str) -> int:
    # bool is an int subclass; refuse it along with floats and strings
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where} must be an integer, got {value!r}")
    return value


def parse_instance(doc: Any) -> Instance:
    if not isinstance(doc, dict):
        raise ParseError("instance document must be a JSON object")
    unknown = set(doc) - _INSTANCE_KEYS
    if unknown:
        raise ParseError(f"unknown instance fields: {sorted(unknown)}")
    for key in ("p", "B", "k", "jobs"):
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
    if not isinstance(doc["jobs"], list):
        raise ParseError("'jobs' must be a list")
    meta = doc.get("meta")
    if meta is not None and not isinstance(meta, dict):
        raise ParseError("'meta' must be an object")
    jobs = []
    for pos, raw in enumerate(doc["jobs"]):
        if not isinstance(raw, dict):
            raise ParseError(f"jobs[{pos}] must be an object")
        extra = set(raw) - _JOB_KEYS
        if extra or not {"r", "d"} <= set(raw):
            raise ParseError(f"jobs[{pos}] needs fields r, d (and optional id); got {sorted(raw)}")
        jid = _int(raw.get("id", pos), f"jobs[{pos}].id")
        if jid < 0:
            raise ParseError(f"jobs[{pos}].id must be >= 0")
        jobs.append(Job(jid, _int(raw["r"], f"jobs[{pos}].r"), _int(raw["d"], f"jobs[{pos}].d")))
    m = doc.get("m")
    try:
        return Instance(
            p=_int(doc["p"], "p"), B=_int(doc["B"], "B"), k=_int(doc["k"], "k"),
            jobs=tuple(jobs), m=None if m is None else _int(m, "m"),
            original_order=tuple(j.id for j in jobs), meta=meta,
        )
    except ParseError:
        raise
    except InstanceError as exc:
        raise ParseError(str(exc)) from exc


def instance_document(inst: Instance) -> dict:
    doc: dict[str, Any] = {"p": inst.p, "B": inst.B, "k": inst.k}
    if inst.m is not None:
        doc["m"] = inst.m
    if inst.meta:
        doc["meta"] = dict(inst.meta)
    by_id = inst.by_id()
    doc["jobs"] = [{"id": i, "r": by_id[i].release, "d": by_id[i].deadline}
                   for i in inst.original_order]
    return doc


def dumps_instance(inst: Instance) -> str:
    doc = instance_document(inst)
    jobs = doc.pop("jobs")
    head = json.dumps(doc, sort_keys=False)[:-1]
    # one job per line keeps large files diffable
    rows = ",\n".join("  " + json.dumps(j) for j in jobs)
    sep = ", " if doc else ""
    body = f'{head}{sep}"jobs": [\n{rows}\n]}}\n' if jobs else f'{head}{sep}"jobs": []}}\n'
    return body


def loads_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    return parse_instance(doc)


def read_instance(path: str | os.PathLike) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return loads_instance(text)


def write_text_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see a partial file."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_instance(path: str | os.PathLike, inst: Instance) -> None:
    write_text_atomic(path, dumps_instance(inst))


# ---------------------------------------------------------------- schedules


def _plain_stats(stats: dict) -> dict:
    out = {}
    for key, value in stats.items():
        if key == "wall_time":
            out["wall_time_us"] = int(round(value * 1e6))
        elif isinstance(value, (bool, int, str)) or value is None:
            out[key] = value
    return out


def schedule_document(outcome: SolveOutcome) -> dict:
    feasible = outcome.feasible
    sched = outcome.result if feasible else None
    return {
        "algorithm": outcome.algorithm,
        "feasible": feasible,
        "total_flow": sched.total_flow if feasible else None,
        "opt_value": outcome.opt_value if feasible else None,
        "shift_total": outcome.shift_total,
        "batches_used": sched.batches_used if feasible else 0,
        "batches": [{"start": b.start, "job_ids": sorted(b.job_ids)} for b in sched.batches]
        if feasible else [],
        "stats": _plain_stats(outcome.stats),
    }


def dumps_schedule(outcome: SolveOutcome) -> str:
    return json.dumps(schedule_document(outcome), indent=2) + "\n"


def write_schedule(path: str | os.PathLike, outcome: SolveOutcome) -> None:
    write_text_atomic(path, dumps_schedule(outcome))


def parse_schedule(doc: Any) -> tuple[bool, Schedule | None]:
    """``(feasible, schedule)``; the schedule's claimed flow is kept for the validator to check."""
    if not isinstance(doc, dict) or "batches" not in doc:
        raise ParseError("schedule document must be an object with a 'batches' list")
    feasible = doc.get("feasible", True)
    if not isinstance(feasible, bool):
        raise ParseError("'feasible' must be a boolean")
    if not feasible:
        return False, None
    batches = []
    for pos, raw in enumerate(doc["batches"]):
        if not isinstance(raw, dict) or not isinstance(raw.get("job_ids"), list):
            raise ParseError(f"batches[{pos}] needs 'start' and a 'job_ids' list")
        start = _int(raw.get("start"), f"batches[{pos}].start")
        ids = [_int(i, f"batches[{pos}].job_ids") for i in raw["job_ids"]]
        if len(set(ids)) != len(ids):
            raise ParseError(f"batches[{pos}] lists a job twice")
        batches.append(Batch(start, ids))
    flow = _int(doc.get("total_flow"), "total_flow")
    used = _int(doc.get("batches_used", len(batches)), "batches_used")
    return True, Schedule(tuple(batches), flow, used)


def read_schedule(path: str | os.PathLike) -> tuple[bool, Schedule | None]:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read schedule {path}: {exc}") from exc
    return parse_schedule(doc)
