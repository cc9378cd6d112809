import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).resolve().parent))

from gen import FIXTURES  # noqa: E402
from udrs.syntax import load_database, load_udrs  # noqa: E402

settings.register_profile("repo", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))


@pytest.fixture
def db_file():
    def load(name: str):
        return load_database(FIXTURES / f"{name}.udrs")
    return load


@pytest.fixture
def goal_file():
    def load(name: str):
        return load_udrs(FIXTURES / f"{name}.udrs")
    return load


# --------------------------------------------------------------- acceptance report

_CRITERIA: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    n, title = mark.args
    entry = _CRITERIA.setdefault(n, {"title": title, "ok": True, "notes": []})
    if rep.when == "setup" and not rep.passed:
        entry["ok"] = False
    if rep.when == "call":
        if hasattr(rep, "wasxfail"):
            entry["ok"] = False
            entry["notes"].append(f"{item.name} is an expected failure ({rep.wasxfail})")
        elif not rep.passed:
            entry["ok"] = False
            entry["notes"].append(f"{item.name} failed")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        line = f"{'PASS' if e['ok'] else 'FAIL'} criterion {n}: {e['title']}"
        terminalreporter.write_line(line)
        for note in e["notes"]:
            terminalreporter.write_line(f"     {note}")
