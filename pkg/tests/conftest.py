import itertools

import pytest

from spanoip.decision_tree import or_tree, single_query_tree, two_zeroes_tree

WORKED = ("0000", "0001", "0011", "0111", "1111")

_ACCEPTANCE_LINES = []


def all_inputs(n):
    return ["".join(b) for b in itertools.product("01", repeat=n)]


@pytest.fixture
def worked():
    return WORKED


@pytest.fixture
def worked_file(tmp_path):
    path = tmp_path / "worked.txt"
    path.write_text("# worked example\n" + "\n".join(WORKED) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def single():
    return single_query_tree()


@pytest.fixture
def or3():
    return or_tree(3)


@pytest.fixture
def two_zeroes5():
    return two_zeroes_tree(5)


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
