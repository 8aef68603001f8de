import pytest

_REPORT = []


@pytest.fixture(scope="session")
def acceptance_report():
    """Collects one ``(criterion, passed, detail)`` line per acceptance check."""
    return _REPORT


def pytest_terminal_summary(terminalreporter):
    if not _REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in sorted(_REPORT):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
