import pytest

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion under its title."""
    results = request.config.stash[_RESULTS]

    def register(number, title):
        results[number] = [title, None]
        request.node.user_properties.append(("criterion", number))

    yield register


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    results = item.config.stash[_RESULTS]
    for key, number in item.user_properties:
        if key == "criterion" and number in results:
            results[number][1] = report.passed


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash[_RESULTS]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, passed = results[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
