"""Normalized activity documents (ActivityStreams 2.0 core plus ``enrichedData``).

Every gathered item, whatever platform it came from, ends up as an
:class:`Activity`. Documents are plain JSON objects using the AS2 member
names; attributes AS2 has no slot for live under ``object.enrichedData``.
Keys this module does not know are kept in ``extra`` maps so a document
survives a parse/serialize round trip untouched.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from datetime import datetime, timedelta, timezone
from typing import Any, Optional

PLATFORMS = ("facebook", "googleplus", "instagram", "twitter", "youtube")


class ActivityError(ValueError):
    """Base class for document errors."""


class SchemaError(ActivityError):
    """The document is well-formed JSON but not an activity."""


class InvalidActivity(ActivityError):
    """Raised when serializing an activity that fails validation."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class PlatformId:
    platform: str
    native_id: str

    @classmethod
    def parse(cls, text: str) -> "PlatformId":
        platform, sep, native_id = text.partition(":")
        if not sep or not platform or not native_id:
            raise ValueError(f"id missing platform prefix: {text!r}")
        return cls(platform, native_id)

    def __str__(self) -> str:
        return f"{self.platform}:{self.native_id}"


def canonical_id(platform: str, native_id: Any) -> str:
    return str(PlatformId(platform, str(native_id)))


# -- timestamps -------------------------------------------------------------

def format_timestamp(dt: datetime) -> str:
    """ISO-8601 with millisecond precision and a ``+HH:MM`` offset.

    Microseconds are kept (six digits) when they are not a whole number of
    milliseconds, so formatting never loses the instant.
    """
    if dt.tzinfo is None or dt.utcoffset() is None:
        raise ValueError("timestamp has no timezone offset")
    if dt.microsecond % 1000:
        frac = f"{dt.microsecond:06d}"
    else:
        frac = f"{dt.microsecond // 1000:03d}"
    offset = dt.utcoffset()
    sign = "-" if offset < timedelta(0) else "+"
    minutes = abs(int(offset.total_seconds())) // 60
    return f"{dt:%Y-%m-%dT%H:%M:%S}.{frac}{sign}{minutes // 60:02d}:{minutes % 60:02d}"


def parse_timestamp(text: str) -> datetime:
    if not isinstance(text, str):
        raise ValueError(f"timestamp must be a string, got {type(text).__name__}")
    value = text.strip()
    if value.endswith(("Z", "z")):
        value = value[:-1] + "+00:00"
    dt = datetime.fromisoformat(value)
    if dt.tzinfo is None:
        raise ValueError(f"timestamp {text!r} has no timezone offset")
    return dt


def epoch_to_datetime(seconds: float, tz: timezone = timezone.utc) -> datetime:
    return datetime.fromtimestamp(seconds, tz)


# -- generic (de)serialization helpers ---------------------------------------

def _key(f) -> str:
    return f.metadata.get("key", f.name)


def _dump_flat(obj, nested: Optional[dict] = None) -> dict:
    out: dict[str, Any] = {}
    for f in fields(obj):
        if f.name == "extra":
            continue
        value = getattr(obj, f.name)
        if value is None:
            continue
        if nested and f.name in nested:
            value = nested[f.name](value)
        elif isinstance(value, tuple):
            value = list(value)
        out[_key(f)] = value
    out.update(obj.extra)
    return out


def _split_known(cls, doc: dict) -> tuple[dict, dict]:
    keys = {_key(f): f.name for f in fields(cls) if f.name != "extra"}
    known, extra = {}, {}
    for k, v in doc.items():
        if k in keys:
            known[keys[k]] = v
        else:
            extra[k] = v
    return known, extra


def _require_object(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(f"{where} must be a JSON object")
    return value


# -- model -------------------------------------------------------------------

@dataclass(frozen=True)
class GeoPoint:
    latitude: float
    longitude: float
    display_name: Optional[str] = field(default=None, metadata={"key": "displayName"})
    altitude: Optional[float] = None
    type: str = "place"
    extra: dict = field(default_factory=dict, compare=True)

    def to_dict(self) -> dict:
        return _dump_flat(self)

    @classmethod
    def from_dict(cls, doc: dict, where: str = "location") -> "GeoPoint":
        known, extra = _split_known(cls, _require_object(doc, where))
        for name in ("latitude", "longitude"):
            if name not in known:
                raise SchemaError(f"{where}.{name} is required")
        return cls(**known, extra=extra)


@dataclass(frozen=True)
class MediaAttachment:
    media_type: str = field(metadata={"key": "mediaType"})
    type: str
    url: str
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return _dump_flat(self)

    @classmethod
    def from_dict(cls, doc: dict, where: str = "media") -> "MediaAttachment":
        known, extra = _split_known(cls, _require_object(doc, where))
        known.setdefault("media_type", "")
        known.setdefault("type", "other")
        known.setdefault("url", "")
        return cls(**known, extra=extra)


def _k(key: str):
    return field(default=None, metadata={"key": key})


@dataclass(frozen=True)
class EnrichedData:
    """Computed metadata attached to an activity object.

    Every field is optional; absent fields are omitted on output so a stored
    document keeps exactly the keys it had.
    """

    abs_fear_factor: Optional[float] = _k("absFearFactor")
    abs_happiness_factor: Optional[float] = _k("absHappinessFactor")
    converted_emoticons: Optional[str] = _k("convertedEmoticons")
    converted_slang: Optional[str] = _k("convertedSlang")
    embedded_urls: Optional[tuple] = _k("embeddedUrls")
    language: Optional[str] = _k("language")
    tags: Optional[tuple] = _k("tags")
    mentions: Optional[tuple] = _k("mentions")
    media: Optional[MediaAttachment] = _k("media")
    num_of_characters: Optional[int] = _k("numOfCharacters")
    num_of_words: Optional[int] = _k("numOfWords")
    avg_word_length: Optional[float] = _k("avgWordLength")
    words_to_sentences_ratio: Optional[float] = _k("wordsToSentencesRatio")
    num_punctuation: Optional[int] = _k("numPunctuation")
    syllables_per_word: Optional[float] = _k("syllablesPerWord")
    entropy: Optional[float] = _k("entropy")
    num_retweets: Optional[int] = _k("numRetweets")
    num_likes: Optional[int] = _k("numLikes")
    num_followers: Optional[int] = _k("numFollowers")
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return _dump_flat(self, {"media": MediaAttachment.to_dict})

    @classmethod
    def from_dict(cls, doc: dict) -> "EnrichedData":
        known, extra = _split_known(cls, _require_object(doc, "object.enrichedData"))
        for name in ("embedded_urls", "tags", "mentions"):
            if isinstance(known.get(name), list):
                known[name] = tuple(known[name])
        if known.get("media") is not None:
            known["media"] = MediaAttachment.from_dict(known["media"], "object.enrichedData.media")
        return cls(**known, extra=extra)


@dataclass(frozen=True)
class Actor:
    id: str
    display_name: str = field(default="", metadata={"key": "displayName"})
    type: str = "person"
    url: Optional[str] = None
    content: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return _dump_flat(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "Actor":
        known, extra = _split_known(cls, _require_object(doc, "actor"))
        if "id" not in known:
            raise SchemaError("actor.id is required")
        return cls(**known, extra=extra)


@dataclass(frozen=True)
class ActivityObject:
    id: str
    content: str = ""
    type: str = "post"
    url: Optional[str] = None
    start_time: Optional[datetime] = field(default=None, metadata={"key": "startTime"})
    location: Optional[GeoPoint] = None
    enriched_data: Optional[EnrichedData] = field(default=None, metadata={"key": "enrichedData"})
    extra: dict = field(default_factory=dict)

    @property
    def platform_id(self) -> PlatformId:
        return PlatformId.parse(self.id)

    def to_dict(self) -> dict:
        return _dump_flat(
            self,
            {
                "start_time": format_timestamp,
                "location": GeoPoint.to_dict,
                "enriched_data": EnrichedData.to_dict,
            },
        )

    @classmethod
    def from_dict(cls, doc: dict) -> "ActivityObject":
        known, extra = _split_known(cls, _require_object(doc, "object"))
        if "id" not in known:
            raise SchemaError("object.id is required")
        if known.get("start_time") is not None:
            try:
                known["start_time"] = parse_timestamp(known["start_time"])
            except ValueError as exc:
                raise SchemaError(f"object.startTime: {exc}") from None
        if known.get("location") is not None:
            known["location"] = GeoPoint.from_dict(known["location"], "object.location")
        if known.get("enriched_data") is not None:
            known["enriched_data"] = EnrichedData.from_dict(known["enriched_data"])
        return cls(**known, extra=extra)


@dataclass(frozen=True)
class Activity:
    actor: Actor
    object: ActivityObject
    verb: str = "post"
    extra: dict = field(default_factory=dict)

    @property
    def id(self) -> str:
        return self.object.id

    @property
    def platform(self) -> str:
        return self.object.id.partition(":")[0]

    @property
    def content(self) -> str:
        return self.object.content

    @property
    def enriched(self) -> EnrichedData:
        return self.object.enriched_data or EnrichedData()

    def with_enriched(self, data: EnrichedData) -> "Activity":
        return replace(self, object=replace(self.object, enriched_data=data))

    def to_dict(self) -> dict:
        doc: dict[str, Any] = {"actor": self.actor.to_dict(), "object": self.object.to_dict()}
        # The reference document layout has no verb member; only non-default verbs are written.
        if self.verb != "post":
            doc["verb"] = self.verb
        doc.update(self.extra)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Activity":
        doc = _require_object(doc, "activity")
        missing = [k for k in ("actor", "object") if k not in doc]
        if missing:
            raise SchemaError(f"activity is missing {' and '.join(missing)}")
        extra = {k: v for k, v in doc.items() if k not in ("actor", "object", "verb")}
        return cls(
            actor=Actor.from_dict(doc["actor"]),
            object=ActivityObject.from_dict(doc["object"]),
            verb=doc.get("verb", "post"),
            extra=extra,
        )


@dataclass(frozen=True)
class ActivityCollection:
    items: tuple = ()
    missing: tuple = ()

    @property
    def total_items(self) -> int:
        return len(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def to_dict(self) -> dict:
        return {
            "type": "Collection",
            "totalItems": len(self.items),
            "items": [a.to_dict() for a in self.items],
        }


# -- operations ----------------------------------------------------------------

def _check_id(value, where: str, problems: list[str]) -> Optional[PlatformId]:
    if not isinstance(value, str) or not value:
        problems.append(f"{where}: id missing")
        return None
    try:
        pid = PlatformId.parse(value)
    except ValueError:
        problems.append(f"{where}: id missing platform prefix")
        return None
    if pid.platform not in PLATFORMS:
        problems.append(f"{where}: unknown platform {pid.platform!r}")
    return pid


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _check_point(loc: GeoPoint, where: str, problems: list[str]) -> None:
    if not _is_number(loc.latitude):
        problems.append(f"{where}.latitude: not a number")
    elif not -90.0 <= loc.latitude <= 90.0:
        problems.append(f"{where}.latitude: latitude out of range")
    if not _is_number(loc.longitude):
        problems.append(f"{where}.longitude: not a number")
    elif not -180.0 <= loc.longitude <= 180.0:
        problems.append(f"{where}.longitude: longitude out of range")
    if loc.type != "place":
        problems.append(f"{where}.type: must be 'place'")


def _check_enriched(data: EnrichedData, problems: list[str]) -> None:
    where = "object.enrichedData"
    for name in ("num_of_characters", "num_of_words", "num_punctuation",
                 "num_retweets", "num_likes", "num_followers",
                 "abs_fear_factor", "abs_happiness_factor", "entropy"):
        value = getattr(data, name)
        if value is not None and (not _is_number(value) or value < 0):
            problems.append(f"{where}.{name}: must be a non-negative number")
    for name, prefix in (("tags", "#"), ("mentions", "@")):
        for item in getattr(data, name) or ():
            if not isinstance(item, str) or item.startswith(prefix):
                problems.append(f"{where}.{name}: entries must be text without {prefix!r}")
                break
    if data.media is not None and not data.media.url:
        problems.append(f"{where}.media.url: must be non-empty")


def validate_activity(a: Activity) -> list[str]:
    """Return the list of violations; an empty list means the activity is valid."""
    problems: list[str] = []
    obj_id = _check_id(a.object.id, "object.id", problems)
    actor_id = _check_id(a.actor.id, "actor.id", problems)
    if obj_id and actor_id and obj_id.platform != actor_id.platform:
        problems.append("actor.id: platform differs from object platform")
    if not isinstance(a.verb, str) or not a.verb:
        problems.append("verb: must be non-empty text")
    if not isinstance(a.object.content, str):
        problems.append("object.content: must be text")
    if a.object.start_time is None:
        problems.append("object.startTime: missing")
    elif a.object.start_time.tzinfo is None:
        problems.append("object.startTime: missing timezone offset")
    if a.object.location is not None:
        _check_point(a.object.location, "object.location", problems)
    if a.object.enriched_data is not None:
        _check_enriched(a.object.enriched_data, problems)
    return problems


def serialize_activity(a: Activity, **dumps_kwargs) -> str:
    problems = validate_activity(a)
    if problems:
        raise InvalidActivity(problems)
    dumps_kwargs.setdefault("ensure_ascii", False)
    return json.dumps(a.to_dict(), **dumps_kwargs)


def parse_activity(doc: str | bytes | dict) -> Activity:
    """Parse a JSON document (text or already-decoded object) into an Activity.

    Raises ``json.JSONDecodeError`` for malformed text and :class:`SchemaError`
    when required members are missing.
    """
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    return Activity.from_dict(doc)
