import pytest

_RESULTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_RESULTS] = []


@pytest.fixture
def record_criterion(request):
    """Log one acceptance line; the test asserts afterwards so failures are still reported."""
    def record(number, title, passed, detail=""):
        request.config.stash[_RESULTS].append((number, title, bool(passed), detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = sorted(config.stash.get(_RESULTS, []))
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in results:
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}")
