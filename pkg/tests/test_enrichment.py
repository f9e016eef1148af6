import json
import math

import pytest
from hypothesis import given, strategies as st

from crossmedia.activity import EnrichedData, MediaAttachment, parse_activity
from crossmedia.enrichment import (
    LexiconError,
    Lexicons,
    compute_content_metrics,
    compute_sentiment,
    convert_emoticons,
    convert_slang,
    default_lexicons,
    detect_language,
    enrich_activity,
    extract_entities,
    shannon_entropy,
    shipped_lexicon_dir,
)

from conftest import make_activity

LEX = default_lexicons()
REFERENCE_TEXT = "RT @bzberlin: #Debüt mit 1:0 gegen @SERCWildWings https://t.co/UNlq698PIJ"


def test_entities_of_reference_text():
    assert extract_entities(REFERENCE_TEXT) == {
        "embeddedUrls": ["https://t.co/UNlq698PIJ"],
        "mentions": ["bzberlin", "SERCWildWings"],
        "tags": ["Debüt"],
    }


@pytest.mark.parametrize("text, expected", [
    ("mail me at a@b.de", {"embeddedUrls": [], "mentions": [], "tags": []}),
    ("#a #b #a @x @x", {"embeddedUrls": [], "mentions": ["x"], "tags": ["a", "b"]}),
    ("see https://x.org/#frag and http://y.org/@me", {
        "embeddedUrls": ["https://x.org/#frag", "http://y.org/@me"], "mentions": [], "tags": []}),
    ("&#39; is an entity", {"embeddedUrls": [], "mentions": [], "tags": []}),
    ("", {"embeddedUrls": [], "mentions": [], "tags": []}),
])
def test_entity_edge_cases(text, expected):
    assert extract_entities(text) == expected


def test_content_metrics_oracle():
    m = compute_content_metrics("Fire near me. Stay away!")
    assert m == {
        "numOfCharacters": 24,
        "numOfWords": 5,
        "avgWordLength": pytest.approx(20 / 5),
        "wordsToSentencesRatio": 2.5,
        "numPunctuation": 2,
        "syllablesPerWord": pytest.approx(7 / 5),  # vowel groups: fi-re, a-way
        "entropy": pytest.approx(shannon_entropy("Fire near me. Stay away!")),
    }


def test_content_metrics_empty_and_url_dots():
    empty = compute_content_metrics("")
    assert empty["numOfWords"] == 0 and empty["wordsToSentencesRatio"] == 0.0 and empty["entropy"] == 0.0
    assert compute_content_metrics(REFERENCE_TEXT)["wordsToSentencesRatio"] == 8.0
    assert compute_content_metrics("https://a.b/c")["wordsToSentencesRatio"] == 1.0


def test_entropy_oracles():
    assert shannon_entropy("aaaa") == 0.0
    assert shannon_entropy("ab") == pytest.approx(1.0, abs=1e-9)
    assert shannon_entropy("abcd") == pytest.approx(2.0, abs=1e-9)
    assert shannon_entropy("") == 0.0


@given(st.text(min_size=1, max_size=200))
def test_entropy_bounds(text):
    h = shannon_entropy(text)
    assert 0.0 <= h <= math.log2(len(set(text))) + 1e-9


def test_conversions_are_whole_token():
    assert convert_emoticons("great :) but :(", LEX.emoticons) == "great smile but sad"
    assert convert_emoticons("a:)b", LEX.emoticons) == "a:)b"
    assert convert_slang("OMG thx u", LEX.slang) == "oh my god thanks you"
    assert convert_slang("your lollipop", LEX.slang) == "your lollipop"


def test_sentiment_counts():
    assert compute_sentiment("Fire and smoke, we are scared", LEX) == {"absFearFactor": 3, "absHappinessFactor": 0}
    assert compute_sentiment("thx everyone, all safe :)", LEX) == {"absFearFactor": 0, "absHappinessFactor": 3}
    assert compute_sentiment("fire fire fire", LEX)["absFearFactor"] == 3
    assert compute_sentiment(REFERENCE_TEXT, LEX) == {"absFearFactor": 0, "absHappinessFactor": 0}


@given(st.lists(st.sampled_from(["fire", "safe", ":)", "lol", "the", "thx", "Feuer!", "x"]), max_size=20).map(" ".join))
def test_sentiment_bounded_by_word_count(text):
    s = compute_sentiment(text, LEX)
    n = len(text.split())
    assert 0 <= s["absFearFactor"] <= n and 0 <= s["absHappinessFactor"] <= n
    assert s["absFearFactor"] + s["absHappinessFactor"] <= n


@pytest.mark.parametrize("text, lang", [
    (REFERENCE_TEXT, "de"),
    ("the fire is near the house", "en"),
    ("das Haus ist in der Nähe", "de"),
    ("12345", "und"),
    ("fire flood", "und"),
    ("", "und"),
])
def test_language_detection(text, lang):
    assert detect_language(text, LEX) == lang


def test_enrich_reference_activity(reference_doc):
    stripped = dict(reference_doc)
    stripped["object"] = {k: v for k, v in reference_doc["object"].items() if k != "enrichedData"}
    out = enrich_activity(parse_activity(stripped)).enriched
    stored = reference_doc["object"]["enrichedData"]
    assert list(out.embedded_urls) == stored["embeddedUrls"]
    assert list(out.mentions) == stored["mentions"]
    assert list(out.tags) == stored["tags"]
    assert out.language == stored["language"]
    assert (out.abs_fear_factor, out.abs_happiness_factor) == (0, 0)


def test_enrich_keeps_passthrough_and_unknown_fields():
    media = MediaAttachment("image/jpeg", "photo", "https://x/y.jpg")
    a = make_activity(content="big fire")
    a = a.with_enriched(EnrichedData(media=media, num_likes=7, extra={"custom": 1}))
    e = enrich_activity(a).enriched
    assert e.media == media and e.num_likes == 7 and e.extra == {"custom": 1}
    assert e.abs_fear_factor == 1
    assert enrich_activity(a).content == "big fire"


def test_enrich_is_idempotent_on_sample():
    a = make_activity(content="OMG the house is on fire :( stay safe #berlin @thw https://t.co/x")
    once = enrich_activity(a)
    assert enrich_activity(once) == once
    assert json.dumps(once.to_dict()) == json.dumps(enrich_activity(once).to_dict())


def test_failing_step_keeps_other_fields(monkeypatch):
    import crossmedia.enrichment.enrich as enrich_mod

    def boom(text, lexicons):
        raise RuntimeError("broken")

    monkeypatch.setattr(enrich_mod, "_STEPS", (enrich_mod._entities, boom, enrich_mod._language))
    e = enrich_activity(make_activity(content="the #fire")).enriched
    assert e.tags == ("fire",) and e.language == "en" and e.num_of_words is None


def test_lexicon_loading(tmp_path):
    assert LEX.fear.isdisjoint(LEX.happiness)
    assert set(LEX.stopwords) == {"de", "en"}
    with pytest.raises(LexiconError):
        Lexicons.load(tmp_path)
    (tmp_path / "stopwords").mkdir()
    (tmp_path / "stopwords" / "en.txt").write_text("the\n")
    with pytest.raises(LexiconError):
        Lexicons.load(tmp_path)
    for name in ("fear.txt", "happiness.txt"):
        (tmp_path / name).write_text("# c\nBad\n" if name == "fear.txt" else "good\n")
    (tmp_path / "emoticons.json").write_text("{}")
    (tmp_path / "slang.json").write_text('{"GR8": "great"}')
    lex = Lexicons.load(tmp_path)
    assert lex.fear == {"bad"} and lex.slang == {"gr8": "great"}
    assert shipped_lexicon_dir().is_dir()
