import pytest

from dqdbell.ensemble import run_ensemble

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def default_ensemble():
    """The reference sweep: 6 R/a values x 12 geometries, base seed 0."""
    return run_ensemble()


@pytest.fixture
def report():
    def _report(criterion, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
