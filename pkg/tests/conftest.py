import pytest

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not report.failed:
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "passed": True, "duration": 0.0, "why": ""})
    entry["duration"] += report.duration
    if report.failed:
        entry["passed"] = False
        if call.excinfo is not None:
            entry["why"] = str(call.excinfo.value).splitlines()[0][:160]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        status = "PASS" if e["passed"] else "FAIL"
        line = f"[{status}] criterion {number:2d}: {e['title']} ({e['duration']:.1f} s)"
        if not e["passed"] and e["why"]:
            line += f" -- {e['why']}"
        terminalreporter.write_line(line)
