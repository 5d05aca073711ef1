import pytest

_RANK = {"SKIP": 0, "PASS": 1, "FAIL": 2}
_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        result = "SKIP" if rep.skipped else ("PASS" if rep.passed else "FAIL")
        key = (m.args[0], m.args[1])
        if _RANK[result] >= _RANK.get(_criteria.get(key), -1):
            _criteria[key] = result


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (number, name), result in sorted(_criteria.items()):
        terminalreporter.write_line(f"ACCEPTANCE {number} {name}: {result}")
