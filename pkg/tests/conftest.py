import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# criterion number -> (title, passed) for the acceptance summary
_CRITERIA: dict[int, tuple[str, bool]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        name = report.nodeid.split("::test_criterion_")[1]
        number, _, title = name.partition("_")
        _CRITERIA[int(number)] = (title.replace("_", " "), report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
