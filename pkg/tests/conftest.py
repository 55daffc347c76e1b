from collections import defaultdict

import pytest

_results: dict[str, list[tuple[str, str]]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion this test checks")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _results[str(marker.args[0])].append((item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_results, key=lambda c: (int("".join(ch for ch in c if ch.isdigit())), c)):
        runs = _results[crit]
        bad = [name for name, out in runs if out != "passed"]
        status = "FAIL" if bad else "PASS"
        line = f"criterion {crit}: {status} ({len(runs) - len(bad)}/{len(runs)} checks)"
        if bad:
            line += "  failing: " + ", ".join(bad)
        tr.write_line(line)
