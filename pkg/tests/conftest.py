from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "pidpo" / "fixtures"


@pytest.fixture
def fixture_path():
    return lambda name: FIXTURES / name


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def report(request):
    """Collect one acceptance line; all lines are printed in the summary."""
    return request.config.stash[_ACCEPTANCE].append


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash[_ACCEPTANCE]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
