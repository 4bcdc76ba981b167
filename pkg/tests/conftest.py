from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from selfoverlap.alphabet import from_probs, uniform  # noqa: E402

# filled by test_acceptance, printed once at the end of the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def u2():
    return uniform(2)


@pytest.fixture
def u3():
    return uniform(3)


@pytest.fixture
def biased():
    return from_probs(["0.7", "0.3"])


@pytest.fixture
def tri():
    return from_probs([Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
