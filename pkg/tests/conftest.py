import pytest

from agraph.fixtures import load_fixture

CRITERION_RESULTS: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(ident, title): acceptance criterion covered by the test")


@pytest.fixture(scope="session")
def blueover():
    return load_fixture("blueover")


@pytest.fixture(scope="session")
def reflection():
    return load_fixture("reflection")


@pytest.fixture(scope="session")
def figure2():
    return load_fixture("figure2")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    ident, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        prev = CRITERION_RESULTS.get(ident, (title, "PASS"))[1]
        status = "PASS" if report.passed and prev == "PASS" else "FAIL"
        CRITERION_RESULTS[ident] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not CRITERION_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for ident in sorted(CRITERION_RESULTS, key=lambda s: int(s.split("-")[1])):
        title, status = CRITERION_RESULTS[ident]
        terminalreporter.write_line(f"{status}  {ident}  {title}")
