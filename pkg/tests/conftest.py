import pytest

from qcm.cli import main as cli_main

from helpers import CLASSROOM

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        verdict = "PASS" if report.passed else "FAIL"
        previous = _criteria.get(number)
        # a criterion split over several tests passes only if all of them do
        if previous is None or previous[1] == "PASS":
            _criteria[number] = (title, verdict)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, verdict = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2} {verdict}: {title}")


@pytest.fixture(scope="session")
def classroom_run(tmp_path_factory):
    """The classroom config simulated once through the CLI."""
    out = tmp_path_factory.mktemp("classroom")
    assert cli_main(["simulate", str(CLASSROOM), "--out", str(out)]) == 0
    return out
