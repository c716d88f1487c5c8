import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and report.passed):
        return
    number = marker.args[0]
    ok, details = _RESULTS.get(number, (True, []))
    ok = ok and report.passed
    details = details + [f"{k}={v}" for k, v in item.user_properties if k != "skip"]
    if not report.passed and report.when != "call":
        details.append(f"{report.when} error")
    _RESULTS[number] = (ok, details)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_RESULTS):
        ok, details = _RESULTS[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {status}  " + "; ".join(dict.fromkeys(details)))
