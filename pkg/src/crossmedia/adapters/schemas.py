"""Native record layouts of the simulated platforms and their mapping to activities.

Each platform stores items in its own shape (loosely modelled on the public
APIs of the time). A :class:`NativeSchema` knows how to read the id, creation
time, searchable text and coordinates of one record and how to turn it into
an :class:`~crossmedia.activity.Activity`.
"""

from __future__ import annotations

from datetime import datetime, timezone
from typing import Optional

from ..activity import (
    Activity,
    ActivityObject,
    Actor,
    EnrichedData,
    GeoPoint,
    MediaAttachment,
    canonical_id,
)


class MappingError(ValueError):
    """A native record lacks the fields every activity needs."""


def _dig(record: dict, *path, default=None):
    cur = record
    for key in path:
        if not isinstance(cur, dict) or cur.get(key) is None:
            return default
        cur = cur[key]
    return cur


def _int(value) -> Optional[int]:
    if value is None:
        return None
    try:
        return int(value)
    except (TypeError, ValueError):
        return None


class NativeSchema:
    platform: str = ""
    object_type = "post"

    def native_id(self, record: dict) -> Optional[str]:
        raise NotImplementedError

    def created(self, record: dict) -> Optional[datetime]:
        raise NotImplementedError

    def text(self, record: dict) -> str:
        raise NotImplementedError

    def coordinates(self, record: dict) -> Optional[tuple]:
        return None

    def place_name(self, record: dict) -> Optional[str]:
        return None

    def actor(self, record: dict) -> Actor:
        raise NotImplementedError

    def url(self, record: dict) -> Optional[str]:
        return None

    def media(self, record: dict) -> Optional[MediaAttachment]:
        return None

    def counts(self, record: dict) -> dict:
        """Engagement numbers keyed by EnrichedData field name."""
        return {}

    def safe_created(self, record: dict) -> Optional[datetime]:
        try:
            return self.created(record)
        except (KeyError, TypeError, ValueError):
            return None

    def to_activity(self, record: dict) -> Activity:
        native_id = self.native_id(record)
        if not native_id:
            raise MappingError(f"{self.platform} record without id")
        created = self.safe_created(record)
        if created is None:
            raise MappingError(f"{self.platform} record {native_id} without valid timestamp")
        location = None
        coords = self.coordinates(record)
        if coords is not None:
            location = GeoPoint(float(coords[0]), float(coords[1]), display_name=self.place_name(record))
        passthrough = {k: v for k, v in self.counts(record).items() if v is not None}
        media = self.media(record)
        enriched = None
        if passthrough or media is not None:
            enriched = EnrichedData(media=media, **passthrough)
        obj = ActivityObject(
            id=canonical_id(self.platform, native_id),
            content=self.text(record),
            type=self.object_type,
            url=self.url(record),
            start_time=created,
            location=location,
            enriched_data=enriched,
        )
        return Activity(actor=self.actor(record), object=obj, extra={"native": record})


class TwitterSchema(NativeSchema):
    """``{id_str, text, created_at, coordinates, place, user, retweet_count, favorite_count, entities}``"""

    platform = "twitter"

    def native_id(self, r):
        return r.get("id_str")

    def created(self, r):
        return datetime.strptime(r["created_at"], "%a %b %d %H:%M:%S %z %Y")

    def text(self, r):
        return r.get("text") or ""

    def coordinates(self, r):
        point = _dig(r, "coordinates", "coordinates")
        if not point:
            return None
        lon, lat = point
        return lat, lon

    def place_name(self, r):
        return _dig(r, "place", "full_name")

    def actor(self, r):
        user = r.get("user") or {}
        return Actor(
            id=canonical_id("twitter", user.get("id_str", "unknown")),
            display_name=user.get("name", ""),
            url=f"https://twitter.com/{user['screen_name']}" if user.get("screen_name") else None,
            content=user.get("description"),
        )

    def url(self, r):
        name = _dig(r, "user", "screen_name", default="i")
        return f"https://twitter.com/{name}/status/{r.get('id_str')}"

    def media(self, r):
        items = _dig(r, "entities", "media") or []
        if not items:
            return None
        m = items[0]
        kind = m.get("type", "photo")
        return MediaAttachment(
            media_type="image/jpeg" if kind == "photo" else "video/mp4",
            type=kind if kind in ("photo", "video") else "other",
            url=m.get("media_url_https", ""),
        )

    def counts(self, r):
        return {
            "num_retweets": _int(r.get("retweet_count")),
            "num_likes": _int(r.get("favorite_count")),
            "num_followers": _int(_dig(r, "user", "followers_count")),
        }


class FacebookSchema(NativeSchema):
    """``{id, message, created_time, from, place{name, location}, reactions, shares, permalink_url, full_picture}``"""

    platform = "facebook"

    def native_id(self, r):
        return r.get("id")

    def created(self, r):
        return datetime.strptime(r["created_time"], "%Y-%m-%dT%H:%M:%S%z")

    def text(self, r):
        return r.get("message") or ""

    def coordinates(self, r):
        loc = _dig(r, "place", "location")
        if not loc or loc.get("latitude") is None:
            return None
        return loc["latitude"], loc["longitude"]

    def place_name(self, r):
        return _dig(r, "place", "name")

    def actor(self, r):
        sender = r.get("from") or {}
        return Actor(
            id=canonical_id("facebook", sender.get("id", "unknown")),
            display_name=sender.get("name", ""),
            type="person",
            url=f"https://www.facebook.com/{sender['id']}" if sender.get("id") else None,
        )

    def url(self, r):
        return r.get("permalink_url")

    def media(self, r):
        if not r.get("full_picture"):
            return None
        return MediaAttachment("image/jpeg", "photo", r["full_picture"])

    def counts(self, r):
        return {
            "num_likes": _int(_dig(r, "reactions", "summary", "total_count")),
            "num_retweets": _int(_dig(r, "shares", "count")),
            "num_followers": _int(_dig(r, "from", "fan_count")),
        }


class InstagramSchema(NativeSchema):
    """``{id, caption{text}, created_time (epoch string), user, location, likes{count}, images, type, link, tags}``"""

    platform = "instagram"

    def native_id(self, r):
        return r.get("id")

    def created(self, r):
        return datetime.fromtimestamp(int(r["created_time"]), timezone.utc)

    def text(self, r):
        return _dig(r, "caption", "text", default="")

    def coordinates(self, r):
        loc = r.get("location")
        if not loc or loc.get("latitude") is None:
            return None
        return loc["latitude"], loc["longitude"]

    def place_name(self, r):
        return _dig(r, "location", "name")

    def actor(self, r):
        user = r.get("user") or {}
        return Actor(
            id=canonical_id("instagram", user.get("id", "unknown")),
            display_name=user.get("full_name") or user.get("username", ""),
            url=f"https://www.instagram.com/{user['username']}/" if user.get("username") else None,
            content=user.get("bio"),
        )

    def url(self, r):
        return r.get("link")

    def media(self, r):
        if r.get("type") == "video":
            url = _dig(r, "videos", "standard_resolution", "url", default="")
            return MediaAttachment("video/mp4", "video", url) if url else None
        url = _dig(r, "images", "standard_resolution", "url", default="")
        return MediaAttachment("image/jpeg", "photo", url) if url else None

    def counts(self, r):
        return {
            "num_likes": _int(_dig(r, "likes", "count")),
            "num_followers": _int(_dig(r, "user", "followed_by")),
        }


class YouTubeSchema(NativeSchema):
    """``{id{videoId}, snippet{publishedAt, channelId, channelTitle, title, description}, statistics, recordingDetails}``"""

    platform = "youtube"
    object_type = "video"

    def native_id(self, r):
        return _dig(r, "id", "videoId")

    def created(self, r):
        return datetime.fromisoformat(r["snippet"]["publishedAt"].replace("Z", "+00:00"))

    def text(self, r):
        snippet = r.get("snippet") or {}
        return "\n".join(p for p in (snippet.get("title"), snippet.get("description")) if p)

    def coordinates(self, r):
        loc = _dig(r, "recordingDetails", "location")
        if not loc or loc.get("latitude") is None:
            return None
        return loc["latitude"], loc["longitude"]

    def place_name(self, r):
        return _dig(r, "recordingDetails", "locationDescription")

    def actor(self, r):
        snippet = r.get("snippet") or {}
        channel = snippet.get("channelId", "unknown")
        return Actor(
            id=canonical_id("youtube", channel),
            display_name=snippet.get("channelTitle", ""),
            type="person",
            url=f"https://www.youtube.com/channel/{channel}",
        )

    def url(self, r):
        return f"https://www.youtube.com/watch?v={self.native_id(r)}"

    def media(self, r):
        return MediaAttachment("video/mp4", "video", self.url(r))

    def counts(self, r):
        return {
            "num_likes": _int(_dig(r, "statistics", "likeCount")),
            "num_followers": _int(_dig(r, "statistics", "subscriberCount")),
        }


class GooglePlusSchema(NativeSchema):
    """``{id, published, url, actor{id, displayName, url}, object{content}, location, plusoners, resharers}``"""

    platform = "googleplus"

    def native_id(self, r):
        return r.get("id")

    def created(self, r):
        return datetime.fromisoformat(r["published"].replace("Z", "+00:00"))

    def text(self, r):
        return _dig(r, "object", "content", default="")

    def coordinates(self, r):
        loc = r.get("location")
        if not loc or loc.get("latitude") is None:
            return None
        return loc["latitude"], loc["longitude"]

    def place_name(self, r):
        return _dig(r, "location", "displayName")

    def actor(self, r):
        actor = r.get("actor") or {}
        return Actor(
            id=canonical_id("googleplus", actor.get("id", "unknown")),
            display_name=actor.get("displayName", ""),
            url=actor.get("url"),
        )

    def url(self, r):
        return r.get("url")

    def counts(self, r):
        return {
            "num_likes": _int(_dig(r, "plusoners", "totalItems")),
            "num_retweets": _int(_dig(r, "resharers", "totalItems")),
        }


SCHEMAS: dict[str, NativeSchema] = {
    s.platform: s
    for s in (TwitterSchema(), FacebookSchema(), InstagramSchema(), YouTubeSchema(), GooglePlusSchema())
}
