import io
import json
import threading

import pytest
from hypothesis import given, settings, strategies as st

from crossmedia.activity import parse_activity
from crossmedia.adapters.synth import synthetic_activities
from crossmedia.storage import (
    ActivityStore,
    InvalidTransition,
    JobNotFound,
    JobRecord,
    JobRunning,
    StoreError,
)

from conftest import T0, hours, make_activity


def job(store, job_id="j1", kind="crawl", state="pending"):
    return store.create_job(JobRecord(job_id, kind, {}, state=state))


def acts(*ids, platform="twitter"):
    return [make_activity(platform, str(i), f"text {i}", T0 + hours(int(i))) for i in ids]


def test_insert_and_duplicate_linking():
    store = ActivityStore()
    job(store, "a")
    job(store, "b")
    assert store.insert_activities("a", acts(1, 2, 3)) == (3, 0)
    assert store.insert_activities("b", acts(2, 3, 4)) == (1, 2)
    assert len(store) == 4
    assert store.job_size("a") == 3 and store.job_size("b") == 3
    rec = store.get_job("b")
    assert (rec.gathered, rec.inserted, rec.deduplicated) == (3, 1, 2)


def test_repeats_within_a_batch_collapse():
    store = ActivityStore()
    job(store)
    assert store.insert_activities("j1", acts(1, 1, 1)) == (1, 0)
    assert store.insert_activities("j1", acts(1)) == (0, 1)
    assert store.job_size("j1") == 1


def test_same_native_id_on_two_platforms_is_two_activities():
    store = ActivityStore()
    job(store)
    store.insert_activities("j1", acts(7) + acts(7, platform="facebook"))
    assert len(store) == 2 and store.check_unique()


def test_paging_is_ordered_and_stable():
    store = ActivityStore()
    job(store)
    store.insert_activities("j1", acts(5, 3, 9, 1))
    store.insert_activities("j1", acts(2, 8))
    ids = [a.id for a in store.load_all("j1")]
    assert ids == [f"twitter:{i}" for i in (1, 2, 3, 5, 8, 9)]
    assert [a.id for a in store.load_page("j1", 2, 3)] == ["twitter:5", "twitter:8"]
    assert len(store.load_page("j1", 10, 6)) == 0
    with pytest.raises(ValueError):
        store.load_page("j1", 0, 0)
    with pytest.raises(ValueError):
        store.load_page("j1", 1, -1)
    with pytest.raises(JobNotFound):
        store.load_page("nope")


def test_ties_broken_by_id():
    store = ActivityStore()
    job(store)
    store.insert_activities("j1", [make_activity(native_id=n, when=T0) for n in ("b", "c", "a")])
    assert [a.id for a in store.load_all("j1")] == ["twitter:a", "twitter:b", "twitter:c"]


def test_load_by_ids_reports_missing():
    store = ActivityStore()
    job(store)
    store.insert_activities("j1", acts(1, 2))
    coll = store.load_by_ids(["twitter:2", "twitter:404", "twitter:1"])
    assert [a.id for a in coll] == ["twitter:2", "twitter:1"]
    assert coll.missing == ("twitter:404",)


def test_delete_removes_only_unshared():
    store = ActivityStore()
    job(store, "a", state="completed")
    job(store, "b", state="completed")
    store.insert_activities("a", acts(1, 2))
    store.insert_activities("b", acts(2, 3))
    assert store.delete_job("a") == 1
    assert "twitter:1" not in store and "twitter:2" in store
    assert store.delete_job("b") == 2
    assert len(store) == 0
    with pytest.raises(JobNotFound):
        store.get_job("a")


def test_delete_running_job_refused():
    store = ActivityStore()
    job(store, state="running")
    with pytest.raises(JobRunning):
        store.delete_job("j1")


def test_job_transitions():
    rec = JobRecord("x", "crawl", {})
    rec.transition("running")
    rec.transition("running")
    rec.transition("cancelled")
    with pytest.raises(InvalidTransition):
        rec.transition("running")
    with pytest.raises(ValueError):
        JobRecord("x", "bogus", {})
    store = ActivityStore()
    job(store)
    with pytest.raises(StoreError):
        job(store)


def test_job_record_round_trip():
    rec = JobRecord("x", "search", {"k": 1}, state="completed", last_tick_at=T0, watermarks={"twitter": 5.0})
    rec.add_request_units("twitter", 3)
    rec.add_request_units("twitter", 2)
    for i in range(205):
        rec.diagnose(f"m{i}")
    assert len(rec.diagnostics) == 200 and rec.diagnostics[-1] == "m204"
    assert JobRecord.from_dict(json.loads(json.dumps(rec.to_dict()))) == rec
    assert rec.to_dict()["counters"]["requestUnitsUsed"] == {"twitter": 5}


def test_list_jobs_newest_first():
    store = ActivityStore()
    store.create_job(JobRecord("old", "crawl", {}, created_at=T0))
    store.create_job(JobRecord("new", "crawl", {}, created_at=T0 + hours(1)))
    assert [j.job_id for j in store.list_jobs()] == ["new", "old"]


def test_file_backend_persists_and_replays(tmp_path):
    store = ActivityStore(tmp_path)
    job(store, "a", state="completed")
    job(store, "b", state="completed")
    store.insert_activities("a", acts(1, 2, 3))
    store.insert_activities("b", acts(3, 4))
    store.delete_job("a")
    store.close()

    again = ActivityStore(tmp_path)
    assert [j.job_id for j in again.list_jobs()] == ["b"]
    assert [a.id for a in again.load_all("b")] == ["twitter:3", "twitter:4"]
    assert len(again) == 2
    assert again.get_job("b").inserted == 1
    assert again.insert_activities("b", acts(4, 5)) == (1, 1)
    again.close()


def test_compaction_shrinks_log_and_keeps_data(tmp_path):
    store = ActivityStore(tmp_path, compact_ratio=0.5)
    job(store, "keep", state="completed")
    job(store, "drop", state="completed")
    store.insert_activities("keep", acts(1, 2))
    store.insert_activities("drop", acts(*range(10, 20)))
    store.flush()
    before = (tmp_path / "activities.jsonl").stat().st_size
    store.delete_job("drop")
    store.flush()
    assert (tmp_path / "activities.jsonl").stat().st_size < before
    assert [a.content for a in store.load_all("keep")] == ["text 1", "text 2"]
    store.close()
    again = ActivityStore(tmp_path)
    assert len(again) == 2 and [j.job_id for j in again.list_jobs()] == ["keep"]
    again.close()


def test_concurrent_inserts_stay_unique():
    store = ActivityStore()
    pool = synthetic_activities(400)
    for i in range(8):
        job(store, f"j{i}")

    def worker(i):
        for start in range(0, 400, 50):
            store.insert_activities(f"j{i}", pool[start:start + 50])

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(store) == 400 and store.check_unique()
    assert sum(store.get_job(f"j{i}").inserted for i in range(8)) == 400
    assert all(store.job_size(f"j{i}") == 400 for i in range(8))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 30), max_size=15), max_size=6))
def test_counters_match_contents(batches):
    store = ActivityStore()
    job(store)
    for batch in batches:
        store.insert_activities("j1", acts(*batch))
    rec = store.get_job("j1")
    distinct = {i for b in batches for i in b}
    assert rec.inserted == len(store) == store.job_size("j1") == len(distinct)
    assert rec.gathered == rec.inserted + rec.deduplicated == sum(len(set(b)) for b in batches)


def test_export_formats():
    store = ActivityStore()
    job(store)
    store.insert_activities("j1", acts(*range(25)))
    buf = io.StringIO()
    assert store.export_jsonl("j1", buf, page_size=10) == 25
    lines = buf.getvalue().splitlines()
    assert [parse_activity(l).id for l in lines] == [a.id for a in store.load_all("j1")]
    coll = store.export_collection("j1")
    assert coll["type"] == "Collection" and coll["totalItems"] == 25
