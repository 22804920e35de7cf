import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from flowbatch.core import Instance, Job

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=600, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def instances(draw, n_max=5, horizon=10, p_values=(1, 2, 3), B_max=3, k_max=4,
              agreeable=None, subset=False):
    """Small instances the oracle can handle.

    ``agreeable=True`` forces non-decreasing deadlines in release order.
    """
    p = draw(st.sampled_from(p_values))
    n = draw(st.integers(0, n_max))
    B = draw(st.integers(1, B_max))
    k = draw(st.integers(0, k_max))
    releases = sorted(draw(st.lists(st.integers(0, horizon - p), min_size=n, max_size=n)))
    deadlines = [draw(st.integers(r + p, horizon)) for r in releases]
    if agreeable:
        deadlines = list(np.maximum.accumulate(deadlines)) if n else []
    ids = draw(st.permutations(range(n)))
    jobs = tuple(Job(ids[i], releases[i], int(deadlines[i])) for i in range(n))
    m = draw(st.integers(0, n)) if subset else None
    return Instance(p=p, B=B, k=k, jobs=jobs, m=m)


def windows(inst):
    return [(j.release, j.deadline) for j in inst.jobs]


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    return request.param


ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """Record a one-line verdict for an acceptance criterion.

    Usage: ``with criterion(3, "oracle equivalence") as note: ...; note("detail")``.
    """
    import contextlib

    @contextlib.contextmanager
    def run(number, title):
        details: list[str] = []
        try:
            yield details.append
        except BaseException as exc:
            ACCEPTANCE[number] = f"criterion {number} FAIL  {title}: {exc}".splitlines()[0][:200]
            raise
        ACCEPTANCE[number] = f"criterion {number} PASS  {title}" + (
            f" ({'; '.join(details)})" if details else "")
        with request.config.pluginmanager.get_plugin("capturemanager").global_and_fixture_disabled():
            print("\n" + ACCEPTANCE[number])

    return run


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
