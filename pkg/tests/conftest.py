import pytest

from finalchain import chain as fc

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(autouse=True)
def fresh_arena():
    with fc.session() as arena:
        yield arena


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
