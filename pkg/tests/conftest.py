from collections import defaultdict

CRITERIA = {}
_OUTCOMES = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, title = mark.args
            CRITERIA[number] = title


def pytest_runtest_logreport(report):
    if report.when == "call" or report.outcome != "passed":
        key = report.nodeid
        for number, title in CRITERIA.items():
            if f"test_criterion_{number:02d}" in key:
                _OUTCOMES[number].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        results = _OUTCOMES.get(number, [])
        ok = bool(results) and all(r == "passed" for r in results)
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {CRITERIA[number]}")
