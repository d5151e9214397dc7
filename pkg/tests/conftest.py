from pathlib import Path

import pytest

from pollbounds import PollDesign, ResponseTally

SPECS = Path(__file__).resolve().parent.parent / "specs"

# NYT/Siena registered-voter poll: 49% / 41% / 10% of 1,532 respondents
NYT_RATE = 0.014
NYT_N = 1532
NYT_M = 0.544


@pytest.fixture
def nyt_design():
    return PollDesign(respondents=NYT_N, response_rate=NYT_RATE)


@pytest.fixture
def nyt_tally():
    return ResponseTally(751, 628, 153)


@pytest.fixture
def specs_dir():
    return SPECS


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
