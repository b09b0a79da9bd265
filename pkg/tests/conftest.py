import pytest

_LINES: list[str] = []


@pytest.fixture(scope="session")
def report_line():
    """Record a one-line criterion verdict, echoed in the terminal summary."""

    def emit(line: str) -> None:
        _LINES.append(line)
        print(line, flush=True)

    return emit


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
