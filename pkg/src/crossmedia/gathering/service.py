"""One-time searches and interval crawls over the platform adapters.

A gathering round for one platform: rewrite the query for the platform's
capabilities, fetch every page of every native request (one request unit per
page), map native records, apply the residual post-filter, enrich, and store.
"""

from __future__ import annotations

import hashlib
import json
import logging
import secrets
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Mapping, Optional

from ..activity import Activity, ActivityCollection
from ..adapters import CapabilityViolation, CursorError, FixtureAdapter, MappingError, QuotaExceeded
from ..enrichment import Lexicons, default_lexicons, enrich_batch
from ..geo import TimeWindow
from ..query import RewritePlan, UnsupportedQuery, rewrite_for_platform
from ..storage import ActivityStore, JobRecord, TERMINAL_STATES
from .requests import CrawlJobSpec, SearchRequest

log = logging.getLogger(__name__)


class QuotaError(RuntimeError):
    """Every requested platform was out of quota before anything was fetched."""

    def __init__(self, retry_after: float):
        super().__init__(f"all platforms quota-exhausted, retry in {retry_after:.1f}s")
        self.retry_after = retry_after


class NotACrawl(ValueError):
    pass


@dataclass
class PlatformOutcome:
    platform: str
    activities: list = field(default_factory=list)
    request_units: int = 0
    filtered_out: int = 0
    truncated: bool = False
    quota_exhausted: bool = False
    retry_after: float = 0.0
    error: Optional[str] = None


@dataclass
class SearchResult:
    job: JobRecord
    collection: ActivityCollection
    truncated: dict
    diagnostics: list


def new_job_id(spec: dict, created: datetime, nonce: Optional[str] = None) -> str:
    """40 hex digits from the job spec digest, creation time and a nonce."""
    digest = hashlib.sha256(json.dumps(spec, sort_keys=True).encode("utf-8")).hexdigest()
    nonce = nonce if nonce is not None else secrets.token_hex(8)
    return hashlib.sha1(f"{digest}|{created.isoformat()}|{nonce}".encode("utf-8")).hexdigest()


def _location(a: Activity) -> tuple:
    loc = a.object.location
    return (loc.latitude, loc.longitude) if loc is not None else (None, None)


class GatheringService:
    def __init__(
        self,
        store: ActivityStore,
        adapters: Mapping[str, FixtureAdapter],
        lexicons: Optional[Lexicons] = None,
        clock: Callable[[], float] = time.time,
    ):
        self.store = store
        self.adapters = dict(adapters)
        self.lexicons = lexicons or default_lexicons()
        self.clock = clock
        self._specs: dict[str, CrawlJobSpec] = {}
        self._tick_locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    # -- planning -------------------------------------------------------------

    def plan(self, req: SearchRequest, platform: str, time_window: Optional[TimeWindow] = None) -> RewritePlan:
        adapter = self._adapter(platform)
        window = time_window if time_window is not None else req.time_window
        return rewrite_for_platform(req.dnf, adapter.caps, query=req.query, geo=req.geo, time_window=window)

    def _adapter(self, platform: str) -> FixtureAdapter:
        try:
            return self.adapters[platform]
        except KeyError:
            raise KeyError(f"no adapter configured for {platform}") from None

    # -- one platform round -----------------------------------------------------

    def gather_platform(
        self, req: SearchRequest, platform: str, time_window: Optional[TimeWindow] = None
    ) -> PlatformOutcome:
        outcome = PlatformOutcome(platform)
        try:
            adapter = self._adapter(platform)
            plan = self.plan(req, platform, time_window)
        except (UnsupportedQuery, KeyError) as exc:
            outcome.error = f"{platform} skipped: {exc}"
            return outcome
        accepted: dict[str, Activity] = {}
        rejected: set = set()
        for native in plan.native_requests:
            cursor = None
            while True:
                try:
                    page = adapter.fetch(native, cursor)
                except QuotaExceeded as exc:
                    outcome.truncated = outcome.quota_exhausted = True
                    outcome.retry_after = exc.retry_after
                    outcome.activities = list(accepted.values())
                    return outcome
                except (CapabilityViolation, CursorError) as exc:
                    outcome.error = f"{platform} skipped: {exc}"
                    outcome.activities = []
                    return outcome
                outcome.request_units += 1
                for record in page.items:
                    try:
                        a = adapter.map_native(record)
                    except MappingError as exc:
                        log.warning("dropping unmappable %s record: %s", platform, exc)
                        outcome.filtered_out += 1
                        continue
                    if a.id in accepted or a.id in rejected:
                        continue
                    lat, lon = _location(a)
                    if plan.post_filter.accepts(a.content, lat, lon, a.object.start_time):
                        accepted[a.id] = a
                    else:
                        rejected.add(a.id)
                        outcome.filtered_out += 1
                cursor = page.next_cursor
                if cursor is None:
                    break
        outcome.activities = list(accepted.values())
        return outcome

    def _record_outcome(self, record: JobRecord, outcome: PlatformOutcome) -> None:
        record.add_request_units(outcome.platform, outcome.request_units)
        record.skipped += outcome.filtered_out
        record.truncated[outcome.platform] = outcome.truncated
        if outcome.error:
            record.diagnose(outcome.error)
        if outcome.quota_exhausted:
            record.diagnose(f"{outcome.platform} quota exhausted, retry in {outcome.retry_after:.1f}s")

    def _store(self, record: JobRecord, activities: list) -> None:
        if not activities:
            return
        try:
            self.store.insert_activities(record.job_id, enrich_batch(activities, self.lexicons))
        except OSError as exc:
            record.diagnose(f"storage failure: {exc}")
            record.transition("failed")
            self.store.save_job(record)
            raise

    # -- search -------------------------------------------------------------------

    def run_search(self, req: SearchRequest | dict) -> SearchResult:
        if isinstance(req, dict):
            req = SearchRequest.from_dict(req)
        created = datetime.now(timezone.utc)
        spec = req.to_dict()
        record = self.store.create_job(JobRecord(new_job_id(spec, created), "search", spec, created_at=created))
        record.transition("running")
        outcomes = [self.gather_platform(req, p) for p in req.platforms]
        if all(o.quota_exhausted and o.request_units == 0 for o in outcomes):
            for o in outcomes:
                self._record_outcome(record, o)
            record.transition("failed")
            self.store.save_job(record)
            raise QuotaError(min(o.retry_after for o in outcomes))
        for o in outcomes:
            self._record_outcome(record, o)
            self._store(record, o.activities)
        record.last_tick_at = datetime.now(timezone.utc)
        record.ticks += 1
        record.transition("completed")
        self.store.save_job(record)
        return SearchResult(record, self.store.load_all(record.job_id), dict(record.truncated), list(record.diagnostics))

    # -- crawl --------------------------------------------------------------------

    def start_crawl(self, spec: CrawlJobSpec | dict) -> str:
        if isinstance(spec, dict):
            spec = CrawlJobSpec.from_dict(spec)
        created = datetime.fromtimestamp(self.clock(), timezone.utc)
        payload = spec.to_dict()
        with self._guard:
            job_id = new_job_id(payload, created)
            while True:
                try:
                    self.store.get_job(job_id)
                except KeyError:
                    break
                job_id = new_job_id(payload, created)
            self.store.create_job(JobRecord(job_id, "crawl", payload, created_at=created))
            self._specs[job_id] = spec
            self._tick_locks[job_id] = threading.Lock()
        return job_id

    def _crawl_spec(self, record: JobRecord) -> CrawlJobSpec:
        if record.kind != "crawl":
            raise NotACrawl(f"job {record.job_id} is a {record.kind} job")
        spec = self._specs.get(record.job_id)
        if spec is None:
            spec = self._specs[record.job_id] = CrawlJobSpec.from_dict(record.spec)
        return spec

    def _tick_lock(self, job_id: str) -> threading.Lock:
        with self._guard:
            return self._tick_locks.setdefault(job_id, threading.Lock())

    def next_tick_at(self, record: JobRecord) -> Optional[float]:
        """Unix time at which the job's next round may start; None once terminal."""
        if record.state in TERMINAL_STATES:
            return None
        spec = self._crawl_spec(record)
        if record.last_tick_at is None:
            return spec.start if spec.start is not None else record.created_at.timestamp()
        return record.last_tick_at.timestamp() + spec.wait_ms / 1000.0

    def _incremental_window(self, spec: CrawlJobSpec, record: JobRecord, platform: str) -> Optional[TimeWindow]:
        base = spec.search.time_window or TimeWindow()
        mark = record.watermarks.get(platform)
        if mark is None:
            return base
        since = mark - spec.wait_ms / 1000.0
        if base.since is not None:
            since = max(since, base.since)
        if base.until is not None and since > base.until:
            return None
        return TimeWindow(since, base.until)

    def crawl_tick(self, job_id: str, now: Optional[float] = None) -> JobRecord:
        """Run one gathering round if the job is due; returns the updated record."""
        with self._tick_lock(job_id):
            record = self.store.get_job(job_id)
            spec = self._crawl_spec(record)
            now = self.clock() if now is None else now
            if record.state in TERMINAL_STATES:
                return record
            if record.state == "pending":
                if spec.start is not None and now < spec.start:
                    return record
                record.transition("running")
            if spec.end is not None and now > spec.end:
                record.transition("completed")
                self.store.save_job(record)
                return record
            due = self.next_tick_at(record)
            if record.last_tick_at is not None and now < due:
                self.store.save_job(record)
                return record
            for platform in spec.platforms:
                window = self._incremental_window(spec, record, platform)
                if window is None:
                    continue
                outcome = self.gather_platform(spec.search, platform, window)
                self._record_outcome(record, outcome)
                if outcome.quota_exhausted:
                    # Partial pages are newest-first; keeping them would move the watermark past unseen items.
                    record.quota_deferrals += 1
                    continue
                if outcome.error:
                    continue
                self._store(record, outcome.activities)
                if outcome.activities:
                    newest = max(a.object.start_time.timestamp() for a in outcome.activities)
                    record.watermarks[platform] = max(newest, record.watermarks.get(platform, newest))
            record.ticks += 1
            record.last_tick_at = datetime.fromtimestamp(now, timezone.utc)
            self.store.save_job(record)
            return record

    def stop_crawl(self, job_id: str) -> JobRecord:
        record = self.store.get_job(job_id)
        if record.state in ("pending", "running"):
            record.transition("cancelled")
            self.store.save_job(record)
        return record

    def job_status(self, job_id: str) -> JobRecord:
        return self.store.get_job(job_id)

    def list_jobs(self) -> list[JobRecord]:
        return self.store.list_jobs()

    def delete_job(self, job_id: str) -> int:
        return self.store.delete_job(job_id)

    def due_jobs(self, now: Optional[float] = None) -> list[str]:
        now = self.clock() if now is None else now
        due = []
        for record in self.store.list_jobs():
            if record.kind != "crawl" or record.state in TERMINAL_STATES:
                continue
            at = self.next_tick_at(record)
            spec = self._crawl_spec(record)
            ends = spec.end is not None and now > spec.end
            if ends or (at is not None and now >= at):
                due.append(record.job_id)
        return due


class Scheduler:
    """Background loop that ticks due crawl jobs; one job never ticks twice at once."""

    def __init__(self, service: GatheringService, poll_interval: float = 0.25, max_workers: int = 4):
        self.service = service
        self.poll_interval = poll_interval
        self._pool = ThreadPoolExecutor(max_workers=max_workers, thread_name_prefix="crawl")
        self._inflight: set = set()
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None

    def _run_tick(self, job_id: str) -> None:
        try:
            self.service.crawl_tick(job_id)
        except Exception:
            log.exception("crawl tick for %s failed", job_id)
        finally:
            with self._lock:
                self._inflight.discard(job_id)

    def poll_once(self) -> int:
        submitted = 0
        for job_id in self.service.due_jobs():
            with self._lock:
                if job_id in self._inflight:
                    continue
                self._inflight.add(job_id)
            self._pool.submit(self._run_tick, job_id)
            submitted += 1
        return submitted

    def _loop(self) -> None:
        while not self._stop.is_set():
            try:
                self.poll_once()
            except Exception:
                log.exception("scheduler poll failed")
            self._stop.wait(self.poll_interval)

    def start(self) -> "Scheduler":
        if self._thread is None:
            self._thread = threading.Thread(target=self._loop, name="crawl-scheduler", daemon=True)
            self._thread.start()
        return self

    def stop(self, wait: bool = True) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join()
            self._thread = None
        self._pool.shutdown(wait=wait)
