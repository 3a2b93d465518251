import pytest

ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, printed at the end of the run."""
    number = request.node.get_closest_marker("criterion").args[0]
    state = {}

    def report(passed: bool, detail: str) -> bool:
        state["line"] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        return passed

    yield report
    ACCEPTANCE[number] = state.get("line", f"criterion {number:2d}: FAIL  (raised before reporting)")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
