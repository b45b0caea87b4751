import pytest

_VERDICTS = []


@pytest.fixture(scope="session")
def verdict():
    """Record and print one PASS/FAIL line; returns ``ok`` for asserting."""

    def emit(criterion, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        _VERDICTS.append(line)
        print("\n" + line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
