import pytest

from mmnoma.config import default_config

# Filled by the acceptance tests; echoed at the end of the run.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def cfg():
    return default_config()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
