import json
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from crossmedia.activity import Activity, ActivityObject, Actor, GeoPoint, canonical_id
from crossmedia.adapters import FixtureAdapter, RateBudget, load_adapters
from crossmedia.gathering import GatheringService
from crossmedia.storage import ActivityStore

DATA = Path(__file__).parent / "data"
T0 = datetime(2017, 2, 1, 12, 0, tzinfo=timezone.utc)


class FakeClock:
    def __init__(self, now: float = T0.timestamp()):
        self.now = now

    def __call__(self) -> float:
        return self.now

    def advance(self, seconds: float) -> None:
        self.now += seconds


@pytest.fixture
def clock():
    return FakeClock()


@pytest.fixture
def reference_doc():
    return json.loads((DATA / "reference_activity.json").read_text(encoding="utf-8"))


@pytest.fixture
def crawl_payload_raw():
    return (DATA / "crawl_payload.json").read_text(encoding="utf-8")


def make_activity(platform="twitter", native_id="1", content="hello world", when=T0, location=None, **obj):
    return Activity(
        actor=Actor(id=canonical_id(platform, "u1"), display_name="someone"),
        object=ActivityObject(
            id=canonical_id(platform, native_id),
            content=content,
            start_time=when,
            location=location,
            **obj,
        ),
    )


def tweet(native_id, text, when=T0, lat=None, lon=None):
    """Minimal native Twitter record."""
    rec = {
        "id_str": str(native_id),
        "text": text,
        "created_at": when.strftime("%a %b %d %H:%M:%S %z %Y"),
        "user": {"id_str": "42", "name": "n", "screen_name": "n", "followers_count": 1},
        "retweet_count": 0,
        "favorite_count": 0,
    }
    if lat is not None:
        rec["coordinates"] = {"type": "Point", "coordinates": [lon, lat]}
    return rec


def fb_post(native_id, text, when=T0):
    return {
        "id": f"100_{native_id}",
        "message": text,
        "created_time": when.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "from": {"id": "100", "name": "page"},
    }


@pytest.fixture
def shipped_adapters(clock):
    return load_adapters(clock=clock)


@pytest.fixture
def service(shipped_adapters, clock):
    return GatheringService(ActivityStore(), shipped_adapters, clock=clock)


def adapter_with(platform, records, capacity=10_000, clock=None):
    budget = RateBudget(capacity, 3600, platform=platform, clock=clock or FakeClock())
    return FixtureAdapter(platform, records, budget=budget)


def hours(n):
    return timedelta(hours=n)


# -- acceptance reporting ------------------------------------------------------------

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "passed": True, "ran": False})
    if report.failed:
        entry["passed"] = False
    if report.when == "call":
        entry["ran"] = True


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        status = "PASS" if entry["passed"] and entry["ran"] else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2} {status}  {entry['title']}")
