"""Fixture-backed platform adapters.

The adapters behave like polling API clients over a fixed corpus of native
records. Each one enforces its platform's query dialect, so a request the
real API could not express is rejected instead of silently answered.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from ..activity import PLATFORMS, Activity
from ..query import (
    Phrase,
    PlatformCapabilities,
    QueryParseError,
    Term,
    evaluate_match,
    literal_matches,
    parse_query,
)
from ..query.parser import tokenize
from ..query.plan import AND, NOT, OR, PHRASE, NativeRequest
from .budget import RateBudget
from .schemas import SCHEMAS, NativeSchema

log = logging.getLogger(__name__)

FULL = frozenset({AND, OR, NOT, PHRASE})

PROFILES: dict[str, PlatformCapabilities] = {
    "twitter": PlatformCapabilities(FULL, native_geo_filter=True, native_time_filter=True, max_results_per_request=100),
    "youtube": PlatformCapabilities(FULL, native_geo_filter=True, native_time_filter=True, max_results_per_request=50),
    "googleplus": PlatformCapabilities(FULL, native_geo_filter=False, native_time_filter=False, max_results_per_request=20),
    "facebook": PlatformCapabilities(frozenset({AND}), native_geo_filter=False, native_time_filter=True, max_results_per_request=25),
    "instagram": PlatformCapabilities(frozenset(), keyword_search=False, max_results_per_request=20),
}

# (capacity, window seconds); configuration, not claims about the real APIs.
DEFAULT_BUDGETS: dict[str, tuple[int, float]] = {
    "twitter": (180, 900.0),
    "youtube": (100, 100.0),
    "googleplus": (100, 100.0),
    "facebook": (200, 3600.0),
    "instagram": (500, 3600.0),
}


class UnknownPlatform(KeyError):
    def __str__(self):
        return f"unknown platform {self.args[0]!r}"


class CapabilityViolation(ValueError):
    """A native request uses syntax the platform does not support."""


class CursorError(ValueError):
    pass


def capabilities(platform: str) -> PlatformCapabilities:
    try:
        return PROFILES[platform]
    except KeyError:
        raise UnknownPlatform(platform) from None


@dataclass(frozen=True)
class Page:
    items: list
    next_cursor: Optional[str] = None


def _request_digest(request: NativeRequest) -> str:
    return hashlib.sha1(repr(request).encode("utf-8")).hexdigest()[:12]


def load_jsonl(path: Path | str) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def shipped_fixture_dir() -> Path:
    return Path(str(resources.files("crossmedia") / "data" / "fixtures"))


class FixtureAdapter:
    """Adapter for one platform over an in-memory corpus of native records."""

    def __init__(
        self,
        platform: str,
        records: Iterable[dict],
        caps: Optional[PlatformCapabilities] = None,
        budget: Optional[RateBudget] = None,
        schema: Optional[NativeSchema] = None,
    ):
        if platform not in PLATFORMS:
            raise UnknownPlatform(platform)
        self.platform = platform
        self.caps = caps or capabilities(platform)
        self.schema = schema or SCHEMAS[platform]
        self.budget = budget
        self._lock = threading.Lock()
        self._records: list[dict] = []
        self._matches: dict[NativeRequest, list[dict]] = {}
        self.fetch_calls = 0
        self.add_records(records)

    @property
    def records(self) -> list[dict]:
        return list(self._records)

    def add_records(self, records: Iterable[dict]) -> None:
        with self._lock:
            self._records.extend(records)
            # Newest first, like the search endpoints of the real platforms.
            self._records.sort(key=self._order_key)
            self._matches.clear()

    def _order_key(self, record):
        created = self.schema.safe_created(record)
        return (-(created.timestamp() if created else 0.0), str(self.schema.native_id(record)))

    # -- native query dialects ----------------------------------------------

    def _native_predicate(self, keyword_string: str):
        caps = self.caps
        if not caps.keyword_search:
            tag = keyword_string.strip()
            if not tag or len(tag.split()) != 1 or any(ch in tag for ch in '()"'):
                raise CapabilityViolation(f"{self.platform} searches a single tag, got {keyword_string!r}")
            # Tags are looked up within the media description.
            term = Term(tag.lstrip("#"))
            return lambda text: literal_matches(term, text)

        if caps.full_boolean:
            try:
                node = parse_query(keyword_string)
            except QueryParseError as exc:
                raise CapabilityViolation(str(exc)) from None
            if PHRASE not in caps.operators and '"' in keyword_string:
                raise CapabilityViolation(f"{self.platform} does not support phrases")
            return lambda text: evaluate_match(node, text)

        try:
            tokens = tokenize(keyword_string)[:-1]
        except QueryParseError as exc:
            raise CapabilityViolation(str(exc)) from None
        literals = []
        for tok in tokens:
            if tok.kind == "WORD":
                literals.append(Term(tok.value))
            elif tok.kind == "PHRASE" and PHRASE in caps.operators:
                literals.append(Phrase(tok.value))
            elif tok.kind == "OP" and tok.value == AND and AND in caps.operators:
                continue
            else:
                raise CapabilityViolation(
                    f"{self.platform} supports only {sorted(caps.operators) or 'single keywords'}, got {tok.value!r}"
                )
        if not literals:
            raise CapabilityViolation("empty keyword string")
        if len(literals) > 1 and AND not in caps.operators:
            raise CapabilityViolation(f"{self.platform} accepts a single keyword")
        return lambda text: all(literal_matches(l, text) for l in literals)

    def _matching(self, request: NativeRequest) -> list[dict]:
        cached = self._matches.get(request)
        if cached is not None:
            return cached
        if request.geo is not None and not self.caps.native_geo_filter:
            raise CapabilityViolation(f"{self.platform} has no native geo filter")
        if request.time_window is not None and not self.caps.native_time_filter:
            raise CapabilityViolation(f"{self.platform} has no native time filter")
        predicate = self._native_predicate(request.keyword_string)
        out = []
        for record in self._records:
            if not predicate(self.schema.text(record)):
                continue
            if request.geo is not None:
                coords = self.schema.coordinates(record)
                if coords is None or not request.geo.contains(*coords):
                    continue
            if request.time_window is not None and not request.time_window.contains(self.schema.safe_created(record)):
                continue
            out.append(record)
        self._matches[request] = out
        return out

    # -- public surface ------------------------------------------------------

    def fetch_page(self, request: NativeRequest, cursor: Optional[str] = None) -> Page:
        """One page of native records for ``request``.

        Quota is not touched here; callers spend a request unit first (see
        :meth:`fetch`).
        """
        with self._lock:
            matches = self._matching(request)
            offset = 0
            if cursor is not None:
                digest, _, raw = cursor.partition(":")
                if digest != _request_digest(request) or not raw.isdigit() or int(raw) > len(matches):
                    raise CursorError(f"unknown cursor {cursor!r}")
                offset = int(raw)
            end = offset + self.caps.max_results_per_request
            self.fetch_calls += 1
            items = matches[offset:end]
            nxt = f"{_request_digest(request)}:{end}" if end < len(matches) else None
            return Page(items, nxt)

    def fetch(self, request: NativeRequest, cursor: Optional[str] = None) -> Page:
        """Spend one request unit, then fetch a page."""
        if self.budget is not None:
            self.budget.consume(1)
        return self.fetch_page(request, cursor)

    def map_native(self, record: dict) -> Activity:
        return self.schema.to_activity(record)

    def __repr__(self) -> str:
        return f"FixtureAdapter({self.platform!r}, {len(self._records)} records)"


def map_native(platform: str, record: dict) -> Activity:
    try:
        schema = SCHEMAS[platform]
    except KeyError:
        raise UnknownPlatform(platform) from None
    return schema.to_activity(record)


def load_adapters(
    fixture_dir: Optional[Path | str] = None,
    budgets: Optional[dict] = None,
    clock=None,
    platforms: Iterable[str] = PLATFORMS,
) -> dict[str, FixtureAdapter]:
    """Build one adapter per platform from ``<fixture_dir>/<platform>.jsonl``.

    ``budgets`` maps platform to ``(capacity, window_seconds)``; missing
    platforms use :data:`DEFAULT_BUDGETS`.
    """
    base = Path(fixture_dir) if fixture_dir else shipped_fixture_dir()
    budgets = {**DEFAULT_BUDGETS, **(budgets or {})}
    adapters = {}
    for platform in platforms:
        path = base / f"{platform}.jsonl"
        records = load_jsonl(path) if path.exists() else []
        if not records:
            log.warning("no fixtures for %s under %s", platform, base)
        capacity, window = budgets[platform]
        kwargs = {"platform": platform}
        if clock is not None:
            kwargs["clock"] = clock
        adapters[platform] = FixtureAdapter(platform, records, budget=RateBudget(capacity, window, **kwargs))
    return adapters


__all__ = [
    "CapabilityViolation", "CursorError", "DEFAULT_BUDGETS", "FixtureAdapter", "PROFILES",
    "Page", "UnknownPlatform", "capabilities", "load_adapters", "load_jsonl", "map_native",
    "shipped_fixture_dir",
]
