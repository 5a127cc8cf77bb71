import time

import numpy as np
import pytest

from sta_pictures import ProtocolSet, build_frame, expansion_suite, iterate, lz_schedule, make_ramp

# acceptance lines collected by test_acceptance.py, echoed after the run
ACCEPTANCE_LINES: list[str] = []
# wall-clock seconds of expensive session fixtures, for runtime criteria
TIMINGS: dict[str, float] = {}


@pytest.fixture(scope="session")
def lz():
    return lz_schedule(-10.0, 1.0, 2.0)


@pytest.fixture(scope="session")
def lz_frames(lz):
    f0 = build_frame(lz)
    f1 = build_frame(iterate(f0), level=1)
    return f0, f1


@pytest.fixture(scope="session")
def lz_protocols(lz):
    return ProtocolSet.build(lz)


@pytest.fixture(scope="session")
def expansion_ramp():
    return make_ramp(1.0, 0.1, 1.0)


@pytest.fixture(scope="session")
def trap_suite(expansion_ramp):
    """Reference, cd and modified runs on the default grid, plus the Ermakov solution."""
    start = time.perf_counter()
    out = expansion_suite(expansion_ramp)
    TIMINGS["trap_suite"] = time.perf_counter() - start
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
