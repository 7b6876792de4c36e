import math

import pytest

from aai.sequence import InterferometerSequence
from aai.units import PowerLawPerturbation

# The reference interferometer: symmetric kicks of amplitude 10, half a period.
AMPLITUDE = 10.0
HOLD = math.pi
BETA = 0.005


@pytest.fixture
def cubic():
    return PowerLawPerturbation(3, BETA)


@pytest.fixture
def symmetric():
    return InterferometerSequence.symmetric(AMPLITUDE, HOLD)


# acceptance-criterion verdicts, collected for the end-of-run summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
