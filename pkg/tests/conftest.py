import pytest

_acceptance_results: list[tuple[str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(id, title): exit criterion of the package")
    config.addinivalue_line("markers", "slow: Monte Carlo runs taking more than a few seconds")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = getattr(report, "_acceptance", None)
    if marker is not None:
        _acceptance_results.append((marker[0], marker[1], "PASS" if report.passed else "FAIL"))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        callspec = getattr(item, "callspec", None)
        title = marker.args[1] + (f" [{callspec.id}]" if callspec else "")
        outcome.get_result()._acceptance = (marker.args[0], title)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for cid, title, status in sorted(_acceptance_results, key=lambda r: (int(r[0].split(".")[0]), r[0])):
        terminalreporter.write_line(f"[{status}] criterion {cid}: {title}")
