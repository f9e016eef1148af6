"""Deterministic synthetic corpora in each platform's native layout.

``python -m crossmedia.adapters.synth OUT_DIR`` regenerates the shipped
fixture files. Texts are assembled from a small vocabulary of crisis-related
fragments so that random queries over it hit a useful share of records.
"""

from __future__ import annotations

import json
import random
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

from ..activity import Activity, ActivityObject, Actor, GeoPoint, canonical_id

KEYWORDS = [
    "fire", "flood", "storm", "berlin", "hamburg", "drill", "help", "police",
    "rain", "house", "road", "power", "warning", "siegen", "feuer", "hochwasser",
]

FRAGMENTS_EN = [
    "house fire near the station", "fire in the house", "flood warning for the river",
    "storm damage in berlin", "road closed after the storm", "power outage in hamburg",
    "police on site", "we need help", "heavy rain tonight", "fire drill today",
    "the river is rising", "stay safe everyone", "thanks to all helpers", "the road is flooded",
    "big fire", "no power since the storm", "help needed at the house", "rain and storm warning",
    "police closed the road", "drill at the fire station", "flood in siegen", "berlin fire brigade",
    "hamburg harbour warning", "traffic is slow", "great work by the police",
]
FRAGMENTS_DE = [
    "Feuer in der Innenstadt", "Hochwasser an der Sieg", "Sturm über Berlin", "die Straße ist gesperrt",
    "Stromausfall in Hamburg", "Polizei ist vor Ort", "wir brauchen Hilfe", "Übung heute mit der Feuerwehr",
    "Regen und Sturm", "das Haus brennt", "Hochwasser in Siegen", "danke an alle Helfer",
    "Feuer und Rauch", "bitte bleibt zu Hause", "die Lage ist ruhig",
]
HASHTAGS = ["#fire", "#berlin", "#flood", "#hochwasser", "#storm", "#hamburg", "#help", "#feuer", "#siegen"]
MENTIONS = ["@feuerwehr", "@police_berlin", "@bzberlin", "@thw", "@drk", "@wetter"]
EXTRAS = [":)", ":(", ";)", ":D", "<3", "lol", "omg", "thx", "asap", "idk", "btw"]

PLACES = [
    ("Berlin, Deutschland", 52.5200, 13.4050),
    ("Hamburg, Deutschland", 53.5511, 9.9937),
    ("Siegen, Deutschland", 50.8748, 8.0243),
    ("Darmstadt, Deutschland", 49.8728, 8.6512),
    ("Neunkirchen, Deutschland", 50.7851, 8.0051),
    ("Köln, Deutschland", 50.9375, 6.9603),
    ("München, Deutschland", 48.1351, 11.5820),
    ("Paris, France", 48.8566, 2.3522),
]

START = datetime(2017, 1, 1, tzinfo=timezone.utc)
SPAN_SECONDS = 90 * 24 * 3600

REFERENCE_TWEET = {
    "id_str": "823724465664883940",
    "text": "RT @bzberlin: #Debüt mit 1:0 gegen @SERCWildWings https://t.co/UNlq698PIJ",
    "created_at": "Wed Feb 01 09:30:47 +0000 2017",
    "coordinates": {"type": "Point", "coordinates": [8.00512706, 50.78506988]},
    "place": {"full_name": "Neunkirchen, Deutschland"},
    "user": {
        "id_str": "84430424271",
        "name": "anonymised",
        "screen_name": "anonymised",
        "description": "56, Ironie, eigene Meinung",
        "followers_count": 120,
    },
    "retweet_count": 3,
    "favorite_count": 0,
    "entities": {"media": [{"type": "photo", "media_url_https": "https://goo.gl/QqV2q6"}]},
}


def _text(rng: random.Random) -> str:
    pool = FRAGMENTS_DE if rng.random() < 0.3 else FRAGMENTS_EN
    parts = rng.sample(pool, rng.randint(1, 3))
    sep = rng.choice([". ", "! ", " "])
    body = sep.join(p[0].upper() + p[1:] if sep != " " else p for p in parts)
    body += rng.choice([".", "!", "", "?"])
    extras = []
    if rng.random() < 0.5:
        extras += rng.sample(HASHTAGS, rng.randint(1, 2))
    if rng.random() < 0.3:
        extras.append(rng.choice(MENTIONS))
    if rng.random() < 0.25:
        extras.append(rng.choice(EXTRAS))
    if rng.random() < 0.3:
        extras.append("https://t.co/" + "".join(rng.choice("abcdefghijkLMNOPQ0123456789") for _ in range(10)))
    rng.shuffle(extras)
    return " ".join([body] + extras) if extras else body


def _when(rng: random.Random) -> datetime:
    return START + timedelta(seconds=rng.randrange(SPAN_SECONDS))


def _place(rng: random.Random):
    if rng.random() < 0.3:
        return None
    name, lat, lon = rng.choice(PLACES)
    return name, round(lat + rng.uniform(-0.05, 0.05), 6), round(lon + rng.uniform(-0.05, 0.05), 6)


def _twitter(rng, i):
    when, place = _when(rng), _place(rng)
    uid = str(rng.randrange(10**9, 10**11))
    rec = {
        "id_str": str(800000000000000000 + i * 7919 + rng.randrange(7919)),
        "text": _text(rng),
        "created_at": when.strftime("%a %b %d %H:%M:%S +0000 %Y"),
        "coordinates": {"type": "Point", "coordinates": [place[2], place[1]]} if place else None,
        "place": {"full_name": place[0]} if place else None,
        "user": {
            "id_str": uid,
            "name": f"user {uid[-4:]}",
            "screen_name": f"user{uid[-6:]}",
            "description": rng.choice(["", "Feuerwehr", "citizen reporter", "news"]),
            "followers_count": rng.randrange(0, 50000),
        },
        "retweet_count": rng.randrange(0, 200),
        "favorite_count": rng.randrange(0, 500),
        "lang": "und",
    }
    if rng.random() < 0.2:
        rec["entities"] = {"media": [{"type": "photo", "media_url_https": f"https://pbs.example/{rec['id_str']}.jpg"}]}
    return rec


def _facebook(rng, i):
    when, place = _when(rng), _place(rng)
    page = str(rng.randrange(10**8, 10**9))
    post_id = f"{page}_{10**15 + i}"
    rec = {
        "id": post_id,
        "message": _text(rng),
        "created_time": when.strftime("%Y-%m-%dT%H:%M:%S+0000"),
        "from": {"id": page, "name": f"page {page[-3:]}", "fan_count": rng.randrange(0, 100000)},
        "reactions": {"summary": {"total_count": rng.randrange(0, 1000)}},
        "shares": {"count": rng.randrange(0, 100)},
        "permalink_url": f"https://www.facebook.com/{page}/posts/{10**15 + i}",
    }
    if place:
        rec["place"] = {"name": place[0], "location": {"latitude": place[1], "longitude": place[2]}}
    if rng.random() < 0.3:
        rec["full_picture"] = f"https://scontent.example/{post_id}.jpg"
    return rec


def _instagram(rng, i):
    when, place = _when(rng), _place(rng)
    uid = str(rng.randrange(10**6, 10**9))
    media_id = f"{10**17 + i}_{uid}"
    video = rng.random() < 0.15
    rec = {
        "id": media_id,
        "caption": {"text": _text(rng)} if rng.random() > 0.03 else None,
        "created_time": str(int(when.timestamp())),
        "user": {"id": uid, "username": f"insta{uid[-5:]}", "full_name": f"Insta {uid[-3:]}", "followed_by": rng.randrange(0, 20000)},
        "location": {"latitude": place[1], "longitude": place[2], "name": place[0]} if place else None,
        "likes": {"count": rng.randrange(0, 2000)},
        "type": "video" if video else "image",
        "images": {"standard_resolution": {"url": f"https://instagram.example/{media_id}.jpg"}},
        "link": f"https://www.instagram.com/p/{media_id}/",
    }
    if video:
        rec["videos"] = {"standard_resolution": {"url": f"https://instagram.example/{media_id}.mp4"}}
    return rec


def _youtube(rng, i):
    when, place = _when(rng), _place(rng)
    vid = "".join(rng.choice("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") for _ in range(11))
    channel = "UC" + "".join(rng.choice("abcdefghijklmnopqrstuvwxyz0123456789") for _ in range(22))
    title = _text(rng).split(".")[0][:80] or "video"
    rec = {
        "id": {"kind": "youtube#video", "videoId": f"{vid}{i:04d}"},
        "snippet": {
            "publishedAt": when.strftime("%Y-%m-%dT%H:%M:%S.000Z"),
            "channelId": channel,
            "channelTitle": f"channel {channel[-4:]}",
            "title": title,
            "description": _text(rng),
        },
        "statistics": {"likeCount": str(rng.randrange(0, 5000)), "viewCount": str(rng.randrange(0, 10**6)),
                       "subscriberCount": str(rng.randrange(0, 10**5))},
    }
    if place:
        rec["recordingDetails"] = {"location": {"latitude": place[1], "longitude": place[2]}, "locationDescription": place[0]}
    return rec


def _googleplus(rng, i):
    when, place = _when(rng), _place(rng)
    uid = str(rng.randrange(10**20, 10**21))
    post = f"z{i:05d}" + "".join(rng.choice("abcdefghijklmnopqrstuvwxyz0123456789") for _ in range(20))
    rec = {
        "id": post,
        "published": when.strftime("%Y-%m-%dT%H:%M:%S.000Z"),
        "url": f"https://plus.google.com/{uid}/posts/{post}",
        "actor": {"id": uid, "displayName": f"plus {uid[-4:]}", "url": f"https://plus.google.com/{uid}"},
        "object": {"content": _text(rng)},
        "plusoners": {"totalItems": rng.randrange(0, 300)},
        "resharers": {"totalItems": rng.randrange(0, 50)},
    }
    if place:
        rec["location"] = {"latitude": place[1], "longitude": place[2], "displayName": place[0]}
    return rec


GENERATORS = {
    "twitter": _twitter,
    "facebook": _facebook,
    "instagram": _instagram,
    "youtube": _youtube,
    "googleplus": _googleplus,
}


def generate(platform: str, n: int = 600, seed: int = 2018) -> list[dict]:
    rng = random.Random(f"{platform}-{seed}")
    records = [GENERATORS[platform](rng, i) for i in range(n)]
    if platform == "twitter":
        records.append(dict(REFERENCE_TWEET))
    return records


def synthetic_activities(n: int, seed: int = 7, platforms=("twitter", "facebook", "youtube")) -> list[Activity]:
    """Plain, already-normalized activities for store and ranking tests."""
    rng = random.Random(seed)
    out = []
    for i in range(n):
        platform = platforms[i % len(platforms)]
        place = _place(rng)
        when = _when(rng)
        obj = ActivityObject(
            id=canonical_id(platform, f"s{seed}-{i}"),
            content=_text(rng),
            url=f"https://example.org/{platform}/{i}",
            start_time=when,
            location=GeoPoint(place[1], place[2], display_name=place[0]) if place else None,
        )
        actor = Actor(id=canonical_id(platform, f"u{rng.randrange(1000)}"), display_name="someone")
        out.append(Activity(actor=actor, object=obj))
    return out


def write_fixtures(out_dir: Path, n: int = 600) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for platform in GENERATORS:
        with open(out_dir / f"{platform}.jsonl", "w", encoding="utf-8") as fh:
            for rec in generate(platform, n):
                fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


if __name__ == "__main__":
    write_fixtures(Path(sys.argv[1]) if len(sys.argv) > 1 else Path("fixtures"))
