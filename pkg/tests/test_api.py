import json
import re

import pytest
from fastapi.testclient import TestClient

from crossmedia.api import create_app
from crossmedia.gathering import GatheringService
from crossmedia.storage import ActivityStore

from conftest import adapter_with, make_activity, tweet

BASE = "/SocialMediaAPI"


@pytest.fixture
def client(service):
    with TestClient(create_app(service)) as c:
        yield c


def post_json(client, path, body):
    return client.post(BASE + path, content=json.dumps(body), headers={"Content-Type": "application/json"})


def test_reference_payload_creates_job(client, crawl_payload_raw):
    resp = client.post(BASE + "/crawlService", content=crawl_payload_raw, headers={"Content-Type": "application/json"})
    assert resp.status_code == 201
    body = resp.json()
    assert list(body) == ["crawljobId"] and re.fullmatch(r"[0-9a-f]{40}", body["crawljobId"])
    status = client.get(f"{BASE}/crawlService/{body['crawljobId']}/status").json()
    assert status["state"] == "pending" and status["spec"]["waitBetweenRequests"] == 10000


@pytest.mark.parametrize("gathering, field, fragment", [
    ({"platforms": ["twitter"], "waitBetweenRequests": 10000}, "keyword", "required"),
    ({"keyword": "x", "platforms": ["myspace"], "waitBetweenRequests": 10000}, "platforms", "myspace"),
    ({"keyword": "x", "platforms": ["twitter"], "waitBetweenRequests": 10}, "waitBetweenRequests", "minimum"),
])
def test_crawl_validation_errors(client, gathering, field, fragment):
    resp = post_json(client, "/crawlService", {"gathering": gathering})
    assert resp.status_code == 400
    body = resp.json()
    assert body["error"] == "invalid_request" and fragment in body["fields"][field]


def test_missing_wrapper_and_bad_bodies(client):
    resp = post_json(client, "/crawlService", {"keyword": "x"})
    assert resp.status_code == 400 and resp.json()["fields"] == {"gathering": "required"}
    resp = client.post(BASE + "/crawlService", content="{}", headers={"Content-Type": "text/plain"})
    assert resp.status_code == 415
    resp = client.post(BASE + "/crawlService", content="{nope", headers={"Content-Type": "application/json"})
    assert resp.status_code == 400 and resp.json()["error"] == "invalid_json"


def test_job_paging_and_lifecycle(client, service):
    jid = post_json(client, "/crawlService", {"gathering": {
        "keyword": "fire", "platforms": ["twitter"], "waitBetweenRequests": 10000}}).json()["crawljobId"]
    service.crawl_tick(jid)
    size = service.store.job_size(jid)
    assert size > 3
    page = client.get(f"{BASE}/crawlService/{jid}", params={"count": 2, "offset": 1}).json()
    assert page["type"] == "Collection" and page["totalItems"] == 2
    everything = client.get(f"{BASE}/crawlService/{jid}", params={"count": size}).json()["items"]
    assert page["items"] == everything[1:3]
    assert client.get(f"{BASE}/crawlService/{jid}", params={"count": 0}).json()["fields"] == {"count": "must be at least 1"}
    assert client.get(f"{BASE}/crawlService/{jid}", params={"offset": -1}).status_code == 400
    assert client.get(f"{BASE}/crawlService/{jid}", params={"count": "x"}).status_code == 400
    assert client.delete(f"{BASE}/crawlService/{jid}").status_code == 409
    assert client.post(f"{BASE}/crawlService/{jid}/stop").json()["state"] == "cancelled"
    assert client.delete(f"{BASE}/crawlService/{jid}").json() == {"removed": size}
    assert client.get(f"{BASE}/crawlService/{jid}").status_code == 404


def test_unknown_job_is_404(client):
    for resp in (client.get(f"{BASE}/crawlService/abc"), client.get(f"{BASE}/crawlService/abc/status"),
                 client.post(f"{BASE}/crawlService/abc/stop"), client.delete(f"{BASE}/crawlService/abc")):
        assert resp.status_code == 404 and resp.json()["error"] == "not_found"


def test_all_jobs_lists_newest_first(client, clock):
    ids = []
    for kw in ("a", "b"):
        ids.append(post_json(client, "/crawlService", {"gathering": {
            "keyword": kw, "platforms": ["twitter"], "waitBetweenRequests": 1000}}).json()["crawljobId"])
        clock.advance(1)
    listed = client.get(f"{BASE}/crawlService/allJobs").json()
    assert [j["jobId"] for j in listed] == ids[::-1]


def test_search_plain_and_ranked(client):
    resp = post_json(client, "/searchService", {"keyword": "fire", "platforms": ["twitter", "facebook"]})
    assert resp.status_code == 200
    assert resp.headers["X-Truncated"] == "twitter=false,facebook=false"
    assert re.fullmatch(r"[0-9a-f]{40}", resp.headers["X-Job-Id"])
    plain = resp.json()
    assert plain["totalItems"] == len(plain["items"]) > 0
    ranked = post_json(client, "/searchService", {"keyword": "fire", "platforms": ["twitter", "facebook"],
                                                  "weightProfile": {"followerCount": 2, "tfIdfScore": 1}}).json()
    scores = [item["qualityScore"] for item in ranked["items"]]
    assert scores == sorted(scores, reverse=True) and all(0 <= s <= 1 for s in scores)
    assert {i["object"]["id"] for i in ranked["items"]} == {i["object"]["id"] for i in plain["items"]}


@pytest.mark.parametrize("body, field", [
    ({"keyword": "NOT x", "platforms": ["twitter"]}, "keyword"),
    ({"keyword": "x", "platforms": ["twitter"], "weightProfile": {"bogus": 1}}, "weightProfile"),
    ({"keyword": "x", "platforms": ["twitter"], "weightProfile": {"likeCount": 0}}, "weightProfile"),
])
def test_search_errors(client, body, field):
    resp = post_json(client, "/searchService", body)
    assert resp.status_code == 400 and field in resp.json()["fields"]


def test_search_quota_exhausted_is_503(clock):
    adapter = adapter_with("twitter", [tweet(1, "fire")], capacity=1, clock=clock)
    adapter.budget.consume()
    client = TestClient(create_app(GatheringService(ActivityStore(), {"twitter": adapter}, clock=clock)))
    resp = post_json(client, "/searchService", {"keyword": "fire", "platforms": ["twitter"]})
    assert resp.status_code == 503 and resp.headers["Retry-After"] == "3600"
    assert resp.json()["error"] == "quota_exhausted"


def test_enrichment_endpoint(client):
    doc = make_activity(content="Fire near #Berlin :(").to_dict()
    resp = post_json(client, "/enrichment", [doc])
    assert resp.status_code == 200
    enriched = resp.json()[0]["object"]["enrichedData"]
    assert enriched["tags"] == ["Berlin"] and enriched["absFearFactor"] == 2
    assert post_json(client, "/enrichment", []).json() == []
    resp = post_json(client, "/enrichment", [doc, {"actor": {}}, doc])
    assert resp.status_code == 400 and list(resp.json()["fields"]) == ["1"]
    assert post_json(client, "/enrichment", {"not": "a list"}).status_code == 400


def test_load_activities_by_id(client, service):
    result = service.run_search({"keyword": "fire", "platforms": ["twitter"]})
    known = result.collection.items[0].id
    body = post_json(client, "/activities", [known, "twitter:nope"]).json()
    assert [i["object"]["id"] for i in body["items"]] == [known] and body["missing"] == ["twitter:nope"]
    assert post_json(client, "/activities", {"x": 1}).status_code == 400
