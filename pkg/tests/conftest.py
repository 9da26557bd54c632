import pytest

_ACCEPTANCE = []


@pytest.fixture
def acceptance(request):
    """Record one summary line per acceptance criterion."""
    def record(label, passed, detail):
        _ACCEPTANCE.append(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
