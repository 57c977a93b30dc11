import json
from pathlib import Path

import pytest

from text2logic.corpus import bundled

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}
    config.addinivalue_line(
        "markers", "criterion(number, title, budget): acceptance criterion with a time budget in seconds"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    report = outcome.get_result()
    number, title = marker.args[:2]
    budget = marker.kwargs.get("budget")
    if report.when == "call" and report.passed and budget is not None and call.duration > budget:
        report.outcome = "failed"
        report.longrepr = f"criterion {number}: took {call.duration:.2f} s, budget {budget} s"
    if report.when == "call" or (report.when == "setup" and not report.passed):
        entry = item.config.stash[_RESULTS].setdefault(
            number, {"title": title, "budget": budget, "outcomes": [], "elapsed": 0.0}
        )
        entry["outcomes"].append(report.outcome)
        entry["elapsed"] += call.duration if report.when == "call" else 0.0


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash[_RESULTS]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        r = results[number]
        outcomes = r["outcomes"]
        if "failed" in outcomes:
            status = "FAIL"
        elif all(o == "skipped" for o in outcomes):
            status = "SKIP"
        else:
            status = "PASS"
        budget = f" (budget {r['budget']:g} s)" if r["budget"] is not None else ""
        terminalreporter.write_line(
            f"[{status}] criterion {number:>2}: {r['title']} - {r['elapsed']:.2f} s{budget}"
        )


@pytest.fixture(scope="session")
def corpus():
    return {p.name: p for p in bundled()}


@pytest.fixture(scope="session")
def car(corpus):
    return corpus["who_is_in_the_car"]


@pytest.fixture(scope="session")
def trial1(corpus):
    return corpus["ladies_or_tigers_trial_1"]


@pytest.fixture(scope="session")
def alpine(corpus):
    return corpus["alpine_club"]


@pytest.fixture(scope="session")
def balls(corpus):
    return corpus["three_balls"]


@pytest.fixture
def fixture_path():
    return lambda name: FIXTURES / name


@pytest.fixture
def write_puzzle(tmp_path):
    """Write a puzzle dict to a temp file and return its path."""

    def write(data, name="p.json"):
        path = tmp_path / name
        path.write_text(data if isinstance(data, str) else json.dumps(data), encoding="utf-8")
        return path

    return write
