import pytest

from harris import make_params


@pytest.fixture
def h22():
    """Harris(2, 2, 1/2), the third published probability table."""
    return make_params(2, 2)


GRID = [(m, k) for m in (1.25, 2.0, 10.0, 50.0) for k in (1, 2, 5)]


# One verdict line per acceptance criterion, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
