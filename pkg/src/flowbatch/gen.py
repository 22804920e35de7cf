"""Seeded instance generators.

Every generator is a pure function of its parameters; the seed is a 64-bit
integer fed to :func:`numpy.random.default_rng` and recorded in ``meta``.
"""
from __future__ import annotations

import numpy as np

from .core import Instance, InstanceError, Job
from .preprocess import check_agreeable

KINDS = ("agreeable-random", "nonagreeable-random", "la-pathology", "la-reverse-pathology")
MAX_REJECTIONS = 10_000


def _windows(rng: np.random.Generator, n: int, p: int, horizon: int):
    """Releases in ``[0, horizon - p]``, deadlines in ``[r + p, horizon]``."""
    if horizon < p:
        raise InstanceError(f"horizon {horizon} shorter than p {p}")
    r = np.sort(rng.integers(0, horizon - p + 1, size=n))
    slack = rng.integers(0, horizon - p - r + 1)
    return r, r + p + slack


def agreeable_random(n: int, B: int, p: int, horizon: int, seed: int, k: int | None = None,
                     m: int | None = None) -> Instance:
    rng = np.random.default_rng(seed)
    r, d = _windows(rng, n, p, horizon)
    d = np.maximum.accumulate(d) if n else d
    return _build(r, d, n, B, p, k, m, "agreeable-random", seed, horizon)


def nonagreeable_random(n: int, B: int, p: int, horizon: int, seed: int, k: int | None = None,
                        m: int | None = None) -> Instance:
    rng = np.random.default_rng(seed)
    for _ in range(MAX_REJECTIONS):
        r, d = _windows(rng, n, p, horizon)
        inst = _build(r, d, n, B, p, k, m, "nonagreeable-random", seed, horizon)
        if not check_agreeable(inst):
            return inst
    raise InstanceError(f"could not draw a non-agreeable instance with n={n}, horizon={horizon}")


def la_pathology(B: int, d: int, k: int = 1) -> Instance:
    """``B`` unit jobs all with window ``(0, d)``."""
    return Instance(p=1, B=B, k=k, jobs=tuple(Job(i, 0, d) for i in range(B)),
                    meta={"generator": "la-pathology", "d": d})


def la_reverse_pathology(B: int, d: int, k: int = 2) -> Instance:
    """``B - 1`` unit jobs on ``(0, d)`` and one on ``(d - 1, d)``."""
    jobs = [Job(i, 0, d) for i in range(B - 1)] + [Job(B - 1, d - 1, d)]
    return Instance(p=1, B=B, k=k, jobs=tuple(jobs),
                    meta={"generator": "la-reverse-pathology", "d": d})


def _build(r, d, n, B, p, k, m, kind, seed, horizon) -> Instance:
    jobs = tuple(Job(i, int(r[i]), int(d[i])) for i in range(n))
    meta = {"generator": kind, "seed": int(seed), "horizon": int(horizon)}
    return Instance(p=p, B=B, k=n if k is None else k, jobs=jobs, m=m, meta=meta)


def generate(kind: str, *, n: int = 6, B: int = 2, p: int = 1, horizon: int = 10,
             seed: int = 0, k: int | None = None, d: int | None = None,
             m: int | None = None) -> Instance:
    if kind == "agreeable-random":
        return agreeable_random(n, B, p, horizon, seed, k, m)
    if kind == "nonagreeable-random":
        return nonagreeable_random(n, B, p, horizon, seed, k, m)
    if kind == "la-pathology":
        return la_pathology(B, horizon if d is None else d, 1 if k is None else k)
    if kind == "la-reverse-pathology":
        return la_reverse_pathology(B, horizon if d is None else d, 2 if k is None else k)
    raise InstanceError(f"unknown generator kind {kind!r}; choose from {KINDS}")
