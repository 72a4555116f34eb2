import pytest

_LINES = []


@pytest.fixture
def record():
    """Collect one summary line per acceptance criterion."""

    def _record(number, ok, detail):
        _LINES.append((number, ok, detail))
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_LINES):
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
