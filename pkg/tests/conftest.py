"""Shared fixtures and hypothesis profiles."""
import os

import pytest
from hypothesis import HealthCheck, settings

from lpheat.scalar_math import RngStream

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def stream():
    return RngStream(20240601)


# one line per acceptance criterion, echoed in the terminal summary so it
# shows up even when output capture is on
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    def record(number: int, title: str, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
