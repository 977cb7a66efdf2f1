import pytest

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.fixture
def criterion(request):
    """Record a named acceptance criterion as pass/fail with a short detail."""
    results = request.config.stash[_RESULTS]

    def record(number: int, name: str, passed: bool, detail: str = ""):
        results[number] = (name, bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        name, ok, detail = results[number]
        line = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {name}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
