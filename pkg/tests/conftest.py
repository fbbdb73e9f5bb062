import math

import pytest
from hypothesis import settings, strategies as st

from parkinglot.geometry import PointX

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def points(theta_lo=-3 * math.pi, theta_hi=3 * math.pi, rad_hi=10.0):
    return st.builds(
        PointX,
        st.floats(theta_lo, theta_hi, allow_nan=False),
        st.floats(1.0, rad_hi, allow_nan=False),
    )


@pytest.fixture
def record_acceptance():
    def record(number, name, ok, detail=""):
        ACCEPTANCE_LINES.append(
            f"{'PASS' if ok else 'FAIL'} criterion {number}: {name}" + (f" [{detail}]" if detail else ""))
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
