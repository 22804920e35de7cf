"""Kernel backend selection.

Hot table fills exist twice: a numba ``@njit`` loop kernel and a vectorised
numpy kernel. ``FLOWBATCH_BACKEND=numpy`` (or ``FLOWBATCH_DISABLE_NUMBA=1``)
forces the numpy path; the default is numba when it imports.
"""
from __future__ import annotations

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

BACKENDS = ("numba", "numpy")


def _default_backend() -> str:
    if os.environ.get("FLOWBATCH_DISABLE_NUMBA", "").strip() not in ("", "0"):
        return "numpy"
    choice = os.environ.get("FLOWBATCH_BACKEND", "").strip().lower()
    if choice in BACKENDS:
        if choice == "numba" and numba is None:
            return "numpy"
        return choice
    return "numba" if numba is not None else "numpy"


_backend = _default_backend()


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choose from {BACKENDS}")
    if name == "numba" and numba is None:
        raise RuntimeError("numba is not installed")
    _backend = name


def resolve(backend: str | None) -> str:
    name = backend or _backend
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choose from {BACKENDS}")
    return name


def njit(func):
    """Lazily compiled ``numba.njit(cache=True, nogil=True)``.

    Compilation is deferred to first call so importing the package never
    pays for kernels the numpy backend will not use.
    """
    if numba is None:  # pragma: no cover
        return func
    return numba.njit(cache=True, nogil=True)(func)
