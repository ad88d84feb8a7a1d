import pytest

# filled by the acceptance criteria as they run
ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    return ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1])):
        terminalreporter.write_line(line)
