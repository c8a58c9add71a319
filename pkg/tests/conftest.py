import os

import pytest
from hypothesis import HealthCheck, settings

from asgcc.scene3d import corpus_text, scene3d_language

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.fixture(scope="session")
def s3d():
    return scene3d_language()


@pytest.fixture(scope="session")
def snail_text():
    return corpus_text("snail")


@pytest.fixture(scope="session")
def helix_text():
    return corpus_text("helix")


@pytest.fixture(scope="session")
def snail(s3d, snail_text):
    return s3d.parse(snail_text)


@pytest.fixture(scope="session")
def helix(s3d, helix_text):
    return s3d.parse(helix_text)


# -- acceptance summary ------------------------------------------------------

_criteria: dict[int, dict] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when not in ("setup", "call"):
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "ok": True, "ran": False})
    if call.excinfo is not None:
        entry["ok"] = False
    if call.when == "call":
        entry["ran"] = True


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "PASS" if entry["ok"] and entry["ran"] else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {entry['title']}")
