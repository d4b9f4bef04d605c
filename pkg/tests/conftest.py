from __future__ import annotations

import pytest

from inkspan.model import make_instance

# filled by test_acceptance, printed once at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def single_item_ladder(T: int):
    """One item with v = w = T and capacity B_t = t."""
    return make_instance([T], [T], list(range(1, T + 1)))


@pytest.fixture
def e1():
    return make_instance([3, 2], [2, 2], [2, 4])


@pytest.fixture
def e2():
    return make_instance([3, 2], [2, 2], [2, 4, 4])


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
