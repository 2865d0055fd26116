import pytest

from mmbp.graph import parse_instance

K4_TEXT = (
    "4 6 2\n"
    "1 2 3.000 1.000\n"
    "1 3 1.000 3.000\n"
    "1 4 2.000 2.000\n"
    "2 3 2.000 2.000\n"
    "2 4 1.000 3.000\n"
    "3 4 3.000 1.000\n"
)

_acceptance: dict[int, tuple[str, str]] = {}


@pytest.fixture
def k4():
    return parse_instance(K4_TEXT)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and not report.passed):
        if report.skipped:
            verdict = "SKIP"
        else:
            verdict = "PASS" if report.passed else "FAIL"
        _acceptance[number] = (title, verdict)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, verdict = _acceptance[number]
        terminalreporter.write_line(f"[{verdict}] criterion {number}: {title}")
