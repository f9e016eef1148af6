import json
from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, strategies as st

from crossmedia.activity import (
    ActivityCollection,
    EnrichedData,
    GeoPoint,
    InvalidActivity,
    PlatformId,
    SchemaError,
    canonical_id,
    format_timestamp,
    parse_activity,
    parse_timestamp,
    serialize_activity,
    validate_activity,
)

from conftest import make_activity


def test_platform_id_parse_and_canonical():
    pid = PlatformId.parse("twitter:823724465664883940")
    assert pid == PlatformId("twitter", "823724465664883940")
    assert str(pid) == "twitter:823724465664883940"
    assert canonical_id("youtube", "abc:def") == "youtube:abc:def"
    assert PlatformId.parse("youtube:abc:def").native_id == "abc:def"
    with pytest.raises(ValueError):
        PlatformId.parse("823724465664883940")


def test_timestamp_format_keeps_offset_and_millis():
    cet = timezone(timedelta(hours=1))
    dt = datetime(2017, 2, 1, 10, 30, 47, tzinfo=cet)
    assert format_timestamp(dt) == "2017-02-01T10:30:47.000+01:00"
    assert format_timestamp(dt.replace(microsecond=123000)) == "2017-02-01T10:30:47.123+01:00"
    neg = datetime(2017, 2, 1, 10, 30, 47, tzinfo=timezone(-timedelta(hours=5, minutes=30)))
    assert format_timestamp(neg).endswith("-05:30")
    with pytest.raises(ValueError):
        format_timestamp(datetime(2017, 2, 1))


def test_parse_timestamp_accepts_z_and_rejects_naive():
    assert parse_timestamp("2017-02-01T09:30:47.000Z") == datetime(2017, 2, 1, 9, 30, 47, tzinfo=timezone.utc)
    with pytest.raises(ValueError):
        parse_timestamp("2017-02-01T09:30:47")


@given(st.datetimes(min_value=datetime(1971, 1, 1), max_value=datetime(2100, 1, 1),
                    timezones=st.sampled_from([timezone.utc, timezone(timedelta(hours=1)),
                                               timezone(-timedelta(hours=7, minutes=30))])))
def test_timestamp_roundtrip(dt):
    assert parse_timestamp(format_timestamp(dt)) == dt


def test_reference_document_roundtrips_exactly(reference_doc):
    a = parse_activity(reference_doc)
    assert validate_activity(a) == []
    assert json.loads(serialize_activity(a)) == reference_doc
    assert a.id == "twitter:823724465664883940"
    assert a.platform == "twitter"
    assert a.enriched.num_retweets == 3
    assert a.enriched.media.media_type == "image/jpeg"
    assert a.object.location.display_name == "Neunkirchen, Deutschland"
    assert a.object.start_time.utcoffset() == timedelta(hours=1)


def test_unknown_keys_survive_roundtrip(reference_doc):
    reference_doc["object"]["enrichedData"]["customScore"] = 0.5
    reference_doc["object"]["location"]["accuracy"] = 12
    reference_doc["generator"] = {"name": "x"}
    a = parse_activity(json.dumps(reference_doc))
    assert a.enriched.extra == {"customScore": 0.5}
    assert json.loads(serialize_activity(a)) == reference_doc


def test_non_default_verb_is_written():
    a = make_activity()
    assert "verb" not in a.to_dict()
    doc = a.to_dict() | {"verb": "share"}
    assert parse_activity(doc).verb == "share"
    assert parse_activity(doc).to_dict()["verb"] == "share"


@pytest.mark.parametrize("mutate, message", [
    (lambda d: d["object"]["location"].update(latitude=91.0), "object.location.latitude: latitude out of range"),
    (lambda d: d["object"].update(id="823724465664883940"), "object.id: id missing platform prefix"),
    (lambda d: d["object"].update(id="myspace:1"), "object.id: unknown platform 'myspace'"),
    (lambda d: d["actor"].update(id="facebook:1"), "actor.id: platform differs from object platform"),
    (lambda d: d["object"]["enrichedData"].update(numOfWords=-1), "object.enrichedData.num_of_words: must be a non-negative number"),
    (lambda d: d["object"]["enrichedData"].update(tags=["#Debüt"]), "object.enrichedData.tags: entries must be text without '#'"),
])
def test_validation_reports_field_paths(reference_doc, mutate, message):
    mutate(reference_doc)
    a = parse_activity(reference_doc)
    assert message in validate_activity(a)
    with pytest.raises(InvalidActivity) as exc:
        serialize_activity(a)
    assert message in exc.value.violations


def test_missing_start_time_is_invalid(reference_doc):
    del reference_doc["object"]["startTime"]
    assert validate_activity(parse_activity(reference_doc)) == ["object.startTime: missing"]


@pytest.mark.parametrize("doc", [
    {"object": {"id": "twitter:1"}},
    {"actor": {"id": "twitter:1"}, "object": "text"},
    {"actor": {"id": "twitter:1"}, "object": {"id": "twitter:2", "startTime": "yesterday"}},
    {"actor": {"id": "twitter:1"}, "object": {"id": "twitter:2", "location": {"latitude": 1}}},
])
def test_structural_errors_raise_schema_error(doc):
    with pytest.raises(SchemaError):
        parse_activity(doc)


def test_collection_shape():
    items = (make_activity(native_id="1"), make_activity(native_id="2"))
    doc = ActivityCollection(items).to_dict()
    assert doc["type"] == "Collection"
    assert doc["totalItems"] == 2 == len(doc["items"])
    assert ActivityCollection().to_dict() == {"type": "Collection", "totalItems": 0, "items": []}


def test_enriched_data_omits_absent_fields():
    assert EnrichedData().to_dict() == {}
    assert EnrichedData(tags=("a",), language="en").to_dict() == {"tags": ["a"], "language": "en"}


def test_geo_point_layout():
    assert GeoPoint(1.0, 2.0, display_name="x").to_dict() == {
        "latitude": 1.0, "longitude": 2.0, "displayName": "x", "type": "place"}
