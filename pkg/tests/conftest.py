import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=50, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# --- acceptance reporting: one PASS/FAIL line per criterion in the terminal summary ---

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when == "teardown" and rep.passed:
        return
    number, title = mark.args
    entry = _criteria.setdefault(number, {"title": title, "ok": True, "detail": []})
    if rep.failed or (rep.when == "setup" and rep.skipped):
        entry["ok"] = False
    if rep.when == "call":
        entry["detail"] += [str(v) for k, v in item.user_properties if k == "measured"]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        status = "PASS" if e["ok"] else "FAIL"
        detail = f" [{'; '.join(e['detail'])}]" if e["detail"] else ""
        terminalreporter.write_line(f"criterion {number}: {status}  {e['title']}{detail}")
