import pytest

_results = []


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        criterion = dict(report.user_properties).get("criterion")
        if criterion:
            _results.append((criterion, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, outcome in _results:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{mark}] {criterion}")


@pytest.fixture
def criterion(record_property):
    def record(name):
        record_property("criterion", name)
    return record
