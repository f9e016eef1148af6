"""Activity store with a compound-key unique index, per-job membership and paging.

Activities are stored once per ``(platform, native id)`` key and linked to
every job that gathered them. The key index holds fixed-size digests rather
than documents, so it stays small as the store grows; documents live in an
append-only log (on disk when a data directory is given, in memory otherwise)
and are read back on demand.

Global order for paging is ``startTime`` ascending, then canonical id.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Iterable, NamedTuple, Optional

from .activity import Activity, ActivityCollection, parse_activity, serialize_activity

log = logging.getLogger(__name__)

JOB_KINDS = ("search", "crawl")
JOB_STATES = ("pending", "running", "completed", "failed", "cancelled")
TERMINAL_STATES = frozenset({"completed", "failed", "cancelled"})
_TRANSITIONS = {
    "pending": {"running", "cancelled", "failed"},
    "running": {"completed", "failed", "cancelled"},
}


class StoreError(RuntimeError):
    pass


class JobNotFound(KeyError):
    def __str__(self):
        return f"unknown job {self.args[0]!r}"


class JobRunning(StoreError):
    pass


class InvalidTransition(StoreError):
    pass


def key_digest(canonical: str) -> bytes:
    return hashlib.blake2b(canonical.encode("utf-8"), digest_size=16).digest()


def _now() -> datetime:
    return datetime.now(timezone.utc)


def _iso(dt: Optional[datetime]) -> Optional[str]:
    return dt.isoformat() if dt else None


@dataclass
class JobRecord:
    job_id: str
    kind: str
    spec: dict
    state: str = "pending"
    created_at: datetime = field(default_factory=_now)
    last_tick_at: Optional[datetime] = None
    gathered: int = 0
    inserted: int = 0
    deduplicated: int = 0
    skipped: int = 0
    ticks: int = 0
    quota_deferrals: int = 0
    request_units: dict = field(default_factory=dict)
    truncated: dict = field(default_factory=dict)
    watermarks: dict = field(default_factory=dict)  # platform -> newest startTime seen (Unix s)
    diagnostics: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in JOB_KINDS:
            raise ValueError(f"unknown job kind {self.kind!r}")

    def transition(self, new_state: str) -> None:
        if new_state == self.state:
            return
        if new_state not in _TRANSITIONS.get(self.state, ()):
            raise InvalidTransition(f"job {self.job_id}: {self.state} -> {new_state} not allowed")
        self.state = new_state

    def add_request_units(self, platform: str, n: int) -> None:
        self.request_units[platform] = self.request_units.get(platform, 0) + n

    def diagnose(self, message: str, limit: int = 200) -> None:
        self.diagnostics.append(message)
        del self.diagnostics[:-limit]

    def to_dict(self) -> dict:
        return {
            "jobId": self.job_id,
            "kind": self.kind,
            "state": self.state,
            "spec": self.spec,
            "createdAt": _iso(self.created_at),
            "lastTickAt": _iso(self.last_tick_at),
            "counters": {
                "gathered": self.gathered,
                "inserted": self.inserted,
                "deduplicated": self.deduplicated,
                "skipped": self.skipped,
                "ticks": self.ticks,
                "quotaDeferrals": self.quota_deferrals,
                "requestUnitsUsed": dict(self.request_units),
            },
            "truncated": dict(self.truncated),
            "watermarks": dict(self.watermarks),
            "diagnostics": list(self.diagnostics),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "JobRecord":
        c = d.get("counters", {})
        return cls(
            job_id=d["jobId"],
            kind=d["kind"],
            spec=d.get("spec", {}),
            state=d.get("state", "pending"),
            created_at=datetime.fromisoformat(d["createdAt"]),
            last_tick_at=datetime.fromisoformat(d["lastTickAt"]) if d.get("lastTickAt") else None,
            gathered=c.get("gathered", 0),
            inserted=c.get("inserted", 0),
            deduplicated=c.get("deduplicated", 0),
            skipped=c.get("skipped", 0),
            ticks=c.get("ticks", 0),
            quota_deferrals=c.get("quotaDeferrals", 0),
            request_units=dict(c.get("requestUnitsUsed", {})),
            truncated=dict(d.get("truncated", {})),
            watermarks=dict(d.get("watermarks", {})),
            diagnostics=list(d.get("diagnostics", [])),
        )


class InsertResult(NamedTuple):
    inserted: int
    duplicates: int


# -- document backends ----------------------------------------------------------

class MemoryBackend:
    def __init__(self):
        self._docs: list[Optional[str]] = []

    def put(self, text: str) -> int:
        self._docs.append(text)
        return len(self._docs) - 1

    def get(self, handle: int) -> str:
        text = self._docs[handle]
        if text is None:
            raise StoreError("document was deleted")
        return text

    def delete(self, handle: int, canonical: str) -> None:
        self._docs[handle] = None

    def compact(self, live: dict) -> dict:
        """Rewrite storage keeping ``live`` (key -> handle); returns new handles."""
        docs, moved = [], {}
        for key, handle in live.items():
            docs.append(self._docs[handle])
            moved[key] = len(docs) - 1
        self._docs = docs
        return moved

    def close(self) -> None:
        pass


class LogBackend:
    """One JSON document per line; deletions are appended as tombstones."""

    def __init__(self, path: Path):
        self.path = path
        self._fh: IO[bytes] = open(path, "a+b")

    def replay(self):
        """Yield ``(offset, text)`` for live lines and ``(None, canonical_id)`` for tombstones."""
        self._fh.flush()
        with open(self.path, "rb") as fh:
            offset = 0
            for raw in fh:
                line = raw.decode("utf-8").strip()
                if line.startswith('{"$deleted"'):
                    yield None, json.loads(line)["$deleted"]
                elif line:
                    yield offset, line
                offset += len(raw)

    def put(self, text: str) -> int:
        data = text.encode("utf-8") + b"\n"
        self._fh.seek(0, os.SEEK_END)
        offset = self._fh.tell()
        self._fh.write(data)
        return offset

    def get(self, handle: int) -> str:
        self._fh.flush()
        self._fh.seek(handle)
        return self._fh.readline().decode("utf-8").rstrip("\n")

    def delete(self, handle: int, canonical: str) -> None:
        self._fh.seek(0, os.SEEK_END)
        self._fh.write(json.dumps({"$deleted": canonical}).encode("utf-8") + b"\n")

    def compact(self, live: dict) -> dict:
        tmp = self.path.with_suffix(".compact")
        moved = {}
        with open(tmp, "wb") as out:
            for key, handle in live.items():
                moved[key] = out.tell()
                out.write(self.get(handle).encode("utf-8") + b"\n")
        self._fh.close()
        os.replace(tmp, self.path)
        self._fh = open(self.path, "a+b")
        return moved

    def flush(self) -> None:
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()


# -- the store --------------------------------------------------------------------

@dataclass
class _Entry:
    handle: int
    sort_key: tuple
    refs: int = 0


class _Membership:
    """Keys of one job plus a lazily sorted view for paging."""

    __slots__ = ("keys", "_order", "_sorted")

    def __init__(self):
        self.keys: set = set()
        self._order: list = []
        self._sorted = True

    def add(self, key: bytes, sort_key: tuple) -> bool:
        if key in self.keys:
            return False
        self.keys.add(key)
        if self._order and sort_key < self._order[-1][0]:
            self._sorted = False
        self._order.append((sort_key, key))
        return True

    def ordered(self) -> list:
        if not self._sorted:
            self._order.sort()
            self._sorted = True
        return self._order


class ActivityStore:
    """Thread-safe activity store.

    ``data_dir=None`` keeps everything in memory. With a directory, documents
    go to ``activities.jsonl`` and job records / membership to ``jobs.jsonl``;
    both are replayed on open.
    """

    def __init__(self, data_dir: Optional[Path | str] = None, compact_ratio: float = 1.0):
        self._lock = threading.RLock()
        self._index: dict[bytes, _Entry] = {}
        self._jobs: dict[str, JobRecord] = {}
        self._members: dict[str, _Membership] = {}
        self._dead = 0
        self.compact_ratio = compact_ratio
        self.data_dir = Path(data_dir) if data_dir else None
        self._journal: Optional[IO[str]] = None
        if self.data_dir is None:
            self._docs = MemoryBackend()
        else:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            self._docs = LogBackend(self.data_dir / "activities.jsonl")
            self._replay()
            self._journal = open(self.data_dir / "jobs.jsonl", "a", encoding="utf-8")

    # -- persistence ----------------------------------------------------------

    def _replay(self) -> None:
        handles: dict[bytes, tuple] = {}
        for offset, text in self._docs.replay():
            if offset is None:
                handles.pop(key_digest(text), None)
                self._dead += 1
                continue
            a = parse_activity(text)
            handles[key_digest(a.id)] = (offset, self._sort_key(a))
        self._index = {k: _Entry(h, sk) for k, (h, sk) in handles.items()}
        jobs_path = self.data_dir / "jobs.jsonl"
        if not jobs_path.exists():
            return
        with open(jobs_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                event = json.loads(line)
                op = event["op"]
                if op == "job":
                    record = JobRecord.from_dict(event["record"])
                    self._jobs[record.job_id] = record
                    self._members.setdefault(record.job_id, _Membership())
                elif op == "link":
                    members = self._members.setdefault(event["job"], _Membership())
                    for canonical in event["ids"]:
                        entry = self._index.get(key_digest(canonical))
                        if entry and members.add(key_digest(canonical), entry.sort_key):
                            entry.refs += 1
                elif op == "deljob":
                    self._jobs.pop(event["job"], None)
                    members = self._members.pop(event["job"], None)
                    for key in members.keys if members else ():
                        if key in self._index:
                            self._index[key].refs -= 1

    def _log(self, event: dict) -> None:
        if self._journal is not None:
            self._journal.write(json.dumps(event, ensure_ascii=False) + "\n")

    def flush(self) -> None:
        with self._lock:
            if self._journal is not None:
                self._journal.flush()
            if isinstance(self._docs, LogBackend):
                self._docs.flush()

    def close(self) -> None:
        with self._lock:
            self.flush()
            if self._journal is not None:
                self._journal.close()
                self._journal = None
            self._docs.close()

    # -- jobs -------------------------------------------------------------------

    def create_job(self, record: JobRecord) -> JobRecord:
        with self._lock:
            if record.job_id in self._jobs:
                raise StoreError(f"job {record.job_id} already exists")
            self._jobs[record.job_id] = record
            self._members[record.job_id] = _Membership()
            self._log({"op": "job", "record": record.to_dict()})
            return record

    def save_job(self, record: JobRecord) -> None:
        with self._lock:
            if record.job_id not in self._jobs:
                raise JobNotFound(record.job_id)
            self._jobs[record.job_id] = record
            self._log({"op": "job", "record": record.to_dict()})

    def get_job(self, job_id: str) -> JobRecord:
        with self._lock:
            try:
                return self._jobs[job_id]
            except KeyError:
                raise JobNotFound(job_id) from None

    def list_jobs(self) -> list[JobRecord]:
        with self._lock:
            return sorted(self._jobs.values(), key=lambda j: (j.created_at, j.job_id), reverse=True)

    def job_size(self, job_id: str) -> int:
        with self._lock:
            self.get_job(job_id)
            return len(self._members[job_id].keys)

    def newest_start_time(self, job_id: str) -> Optional[float]:
        with self._lock:
            self.get_job(job_id)
            order = self._members[job_id].ordered()
            return order[-1][0][0] if order else None

    # -- activities -----------------------------------------------------------------

    @staticmethod
    def _sort_key(a: Activity) -> tuple:
        return (a.object.start_time.timestamp(), a.id)

    def __len__(self) -> int:
        with self._lock:
            return len(self._index)

    def __contains__(self, canonical: str) -> bool:
        with self._lock:
            return key_digest(canonical) in self._index

    def insert_activities(self, job_id: str, batch: Iterable[Activity]) -> InsertResult:
        """Store new activities and link all of them to ``job_id``.

        Repeats inside one batch are collapsed first; an activity already in
        the store counts as a duplicate and is linked, not rewritten.
        """
        unique: dict[bytes, Activity] = {}
        for a in batch:
            unique.setdefault(key_digest(a.id), a)
        # Serialize outside the lock; only new keys will actually be written.
        with self._lock:
            record = self.get_job(job_id)
            members = self._members[job_id]
            fresh = [k for k in unique if k not in self._index]
        texts = {k: serialize_activity(unique[k]) for k in fresh}
        inserted = duplicates = 0
        linked = []
        with self._lock:
            for key, a in unique.items():
                entry = self._index.get(key)
                if entry is None:
                    text = texts.get(key) or serialize_activity(a)
                    entry = _Entry(self._docs.put(text), self._sort_key(a))
                    self._index[key] = entry
                    inserted += 1
                else:
                    duplicates += 1
                if members.add(key, entry.sort_key):
                    entry.refs += 1
                    linked.append(a.id)
            record.gathered += inserted + duplicates
            record.inserted += inserted
            record.deduplicated += duplicates
            if linked:
                self._log({"op": "link", "job": job_id, "ids": linked})
            self._log({"op": "job", "record": record.to_dict()})
        return InsertResult(inserted, duplicates)

    def _read(self, keys: list) -> list[Activity]:
        with self._lock:
            texts = [self._docs.get(self._index[k].handle) for k in keys]
        return [parse_activity(t) for t in texts]

    def load_page(self, job_id: str, count: int = 100, offset: int = 0) -> ActivityCollection:
        if count < 1:
            raise ValueError("count must be at least 1")
        if offset < 0:
            raise ValueError("offset must not be negative")
        with self._lock:
            self.get_job(job_id)
            order = self._members[job_id].ordered()
            keys = [key for _, key in order[offset:offset + count]]
            items = self._read(keys)
        return ActivityCollection(tuple(items))

    def load_all(self, job_id: str) -> ActivityCollection:
        with self._lock:
            self.get_job(job_id)
            keys = [key for _, key in self._members[job_id].ordered()]
            return ActivityCollection(tuple(self._read(keys)))

    def load_by_ids(self, ids: Iterable[str]) -> ActivityCollection:
        found, missing = [], []
        with self._lock:
            for canonical in ids:
                key = key_digest(canonical)
                if key in self._index:
                    found.append(key)
                else:
                    missing.append(canonical)
            items = self._read(found)
        return ActivityCollection(tuple(items), tuple(missing))

    def delete_job(self, job_id: str) -> int:
        """Remove a job; activities no other job links to are removed too."""
        with self._lock:
            record = self.get_job(job_id)
            if record.state == "running":
                raise JobRunning(f"job {job_id} is running; stop first")
            members = self._members.pop(job_id)
            del self._jobs[job_id]
            removed = 0
            for sort_key, key in members.ordered():
                entry = self._index[key]
                entry.refs -= 1
                if entry.refs <= 0:
                    self._docs.delete(entry.handle, sort_key[1])
                    del self._index[key]
                    removed += 1
            self._dead += removed
            self._log({"op": "deljob", "job": job_id})
            if self._dead and self._dead > self.compact_ratio * max(1, len(self._index)):
                self.compact()
            return removed

    def compact(self) -> None:
        with self._lock:
            moved = self._docs.compact({k: e.handle for k, e in self._index.items()})
            for key, handle in moved.items():
                self._index[key].handle = handle
            self._dead = 0
            if self._journal is not None:
                self._rewrite_journal()

    def _rewrite_journal(self) -> None:
        path = self.data_dir / "jobs.jsonl"
        tmp = path.with_suffix(".compact")
        with open(tmp, "w", encoding="utf-8") as out:
            for job_id, record in self._jobs.items():
                out.write(json.dumps({"op": "job", "record": record.to_dict()}, ensure_ascii=False) + "\n")
                ids = [sk[1] for sk, _ in self._members[job_id].ordered()]
                if ids:
                    out.write(json.dumps({"op": "link", "job": job_id, "ids": ids}, ensure_ascii=False) + "\n")
        self._journal.close()
        os.replace(tmp, path)
        self._journal = open(path, "a", encoding="utf-8")

    def check_unique(self) -> bool:
        """Full scan: every stored document has a distinct compound key."""
        with self._lock:
            keys = [k for k in self._index]
            docs = self._read(keys)
        seen = set()
        for a in docs:
            pid = a.object.platform_id
            if (pid.platform, pid.native_id) in seen:
                return False
            seen.add((pid.platform, pid.native_id))
        return len(seen) == len(keys)

    # -- export -------------------------------------------------------------------

    def export_jsonl(self, job_id: str, fh: IO[str], page_size: int = 1000) -> int:
        written, offset = 0, 0
        while True:
            page = self.load_page(job_id, page_size, offset)
            for a in page:
                fh.write(serialize_activity(a) + "\n")
            written += len(page)
            offset += page_size
            if len(page) < page_size:
                return written

    def export_collection(self, job_id: str) -> dict:
        return self.load_all(job_id).to_dict()
