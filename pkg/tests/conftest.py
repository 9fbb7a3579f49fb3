import pytest

_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number, ok, detail, elapsed, limit):
        ok = bool(ok) and elapsed < limit
        line = (
            f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
            f"  [{elapsed:.2f}s, limit {limit:g}s]"
        )
        _VERDICTS.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS):
            terminalreporter.write_line(line)
