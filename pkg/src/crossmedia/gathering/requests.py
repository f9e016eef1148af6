"""Validated search and crawl parameters.

Both request types are built from JSON-shaped dicts with the public parameter
names (``keyword``, ``platforms``, ``since``, ``until``, ``latitude``,
``longitude``, ``radius``, ``waitBetweenRequests``, ``start``, ``end``).
Every problem is reported against the field that caused it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

from ..activity import PLATFORMS
from ..geo import DEFAULT_RADIUS_KM, GeoCircle, TimeWindow
from ..query import Dnf, Node, QueryParseError, UnsupportedQuery, parse_query, to_dnf

MIN_WAIT_MS = 1000


class InvalidRequest(ValueError):
    def __init__(self, fields: dict[str, str], message: str = "invalid request"):
        detail = "; ".join(f"{k}: {v}" for k, v in fields.items())
        super().__init__(f"{message} ({detail})" if detail else message)
        self.message = message
        self.fields = dict(fields)


def _epoch(value: Any, name: str, errors: dict) -> Optional[float]:
    """Unix seconds given as a number or a numeric string."""
    if value is None:
        return None
    if isinstance(value, bool):
        errors[name] = "must be Unix time in seconds"
        return None
    if isinstance(value, str):
        try:
            value = float(value.strip())
        except ValueError:
            errors[name] = "must be Unix time in seconds"
            return None
    if not isinstance(value, (int, float)) or not math.isfinite(value):
        errors[name] = "must be Unix time in seconds"
        return None
    return float(value)


def _number(value: Any, name: str, errors: dict) -> Optional[float]:
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        errors[name] = "must be a number"
        return None
    return float(value)


def _keyword(data: dict, errors: dict) -> tuple[str, Optional[Node], Optional[Dnf]]:
    keyword = data.get("keyword")
    if keyword is None:
        errors["keyword"] = "required"
        return "", None, None
    if not isinstance(keyword, str) or not keyword.strip():
        errors["keyword"] = "must be a non-empty query string"
        return "", None, None
    try:
        node = parse_query(keyword)
        return keyword, node, to_dnf(node)
    except QueryParseError as exc:
        errors["keyword"] = f"query syntax error: {exc}"
    except UnsupportedQuery as exc:
        errors["keyword"] = f"unsupported query: {exc}"
    return keyword, None, None


def _platforms(data: dict, errors: dict) -> tuple:
    raw = data.get("platforms")
    if raw is None:
        errors["platforms"] = "required"
        return ()
    if isinstance(raw, str):
        raw = [p for p in raw.split(",") if p.strip()]
    if not isinstance(raw, list) or not raw:
        errors["platforms"] = "must be a non-empty list of platforms"
        return ()
    out = []
    for p in raw:
        name = p.strip().lower() if isinstance(p, str) else p
        if name not in PLATFORMS:
            errors["platforms"] = f"unknown platform {p!r}; expected one of {', '.join(PLATFORMS)}"
            return ()
        out.append(name)
    return tuple(dict.fromkeys(out))


def _geo(data: dict, errors: dict) -> Optional[GeoCircle]:
    lat = _number(data.get("latitude"), "latitude", errors)
    lon = _number(data.get("longitude"), "longitude", errors)
    radius = _number(data.get("radius"), "radius", errors)
    if lat is not None and not -90 <= lat <= 90:
        errors["latitude"] = "must be within [-90, 90]"
    if lon is not None and not -180 <= lon <= 180:
        errors["longitude"] = "must be within [-180, 180]"
    if (lat is None) != (lon is None) and not {"latitude", "longitude"} & errors.keys():
        missing = "longitude" if lon is None else "latitude"
        errors[missing] = "latitude and longitude must be given together"
    if radius is not None:
        if radius <= 0:
            errors["radius"] = "must be positive"
        elif lat is None and lon is None and "radius" not in errors:
            errors["radius"] = "requires latitude and longitude"
    if {"latitude", "longitude", "radius"} & errors.keys() or lat is None or lon is None:
        return None
    return GeoCircle(lat, lon, radius if radius is not None else DEFAULT_RADIUS_KM)


def _window(data: dict, errors: dict) -> Optional[TimeWindow]:
    since = _epoch(data.get("since"), "since", errors)
    until = _epoch(data.get("until"), "until", errors)
    if since is not None and until is not None and since > until:
        errors["until"] = "must not be before since"
        return None
    if since is None and until is None:
        return None
    return TimeWindow(since, until)


@dataclass(frozen=True)
class SearchRequest:
    keyword: str
    platforms: tuple
    query: Node = field(compare=False, repr=False)
    dnf: Dnf = field(compare=False, repr=False)
    time_window: Optional[TimeWindow] = None
    geo: Optional[GeoCircle] = None

    @classmethod
    def from_dict(cls, data: Any) -> "SearchRequest":
        if not isinstance(data, dict):
            raise InvalidRequest({}, "request body must be a JSON object")
        errors: dict[str, str] = {}
        keyword, node, dnf = _keyword(data, errors)
        platforms = _platforms(data, errors)
        window = _window(data, errors)
        geo = _geo(data, errors)
        if errors:
            raise InvalidRequest(errors)
        return cls(keyword, platforms, node, dnf, window, geo)

    def to_dict(self) -> dict:
        out: dict = {"keyword": self.keyword, "platforms": list(self.platforms)}
        if self.time_window:
            out.update({k: v for k, v in self.time_window.to_dict().items() if v is not None})
        if self.geo:
            out.update(self.geo.to_dict())
        return out


@dataclass(frozen=True)
class CrawlJobSpec:
    """A crawl: the search it repeats plus its schedule.

    ``start``/``end`` bound when rounds run; ``since``/``until`` bound which
    items count as matches.
    """

    search: SearchRequest
    wait_ms: int
    start: Optional[float] = None
    end: Optional[float] = None

    @property
    def keyword(self) -> str:
        return self.search.keyword

    @property
    def platforms(self) -> tuple:
        return self.search.platforms

    @classmethod
    def from_dict(cls, data: Any) -> "CrawlJobSpec":
        if not isinstance(data, dict):
            raise InvalidRequest({}, "crawl parameters must be a JSON object")
        errors: dict[str, str] = {}
        try:
            search = SearchRequest.from_dict(data)
        except InvalidRequest as exc:
            errors.update(exc.fields)
            search = None
        wait = data.get("waitBetweenRequests")
        if isinstance(wait, str) and wait.strip().isdigit():
            wait = int(wait.strip())
        if wait is None:
            errors["waitBetweenRequests"] = "required"
        elif isinstance(wait, bool) or not isinstance(wait, (int, float)) or not math.isfinite(wait):
            errors["waitBetweenRequests"] = "must be milliseconds"
        elif wait < MIN_WAIT_MS:
            errors["waitBetweenRequests"] = f"below minimum interval of {MIN_WAIT_MS} ms"
        start = _epoch(data.get("start"), "start", errors)
        end = _epoch(data.get("end"), "end", errors)
        if start is not None and end is not None and end <= start:
            errors["end"] = "must be after start"
        if errors:
            raise InvalidRequest(errors)
        return cls(search, int(wait), start, end)

    def to_dict(self) -> dict:
        out = self.search.to_dict()
        out["waitBetweenRequests"] = self.wait_ms
        if self.start is not None:
            out["start"] = self.start
        if self.end is not None:
            out["end"] = self.end
        return out
