import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from crossmedia.activity import EnrichedData, GeoPoint, MediaAttachment
from crossmedia.quality import (
    CATEGORIES,
    METHODS,
    AssessmentError,
    CorpusContext,
    QueryContext,
    WeightProfile,
    assess_activity,
    rank_activities,
)
from crossmedia.query import parse_query

from conftest import T0, hours, make_activity


def act(i, content="fire here", followers=None, likes=None, when=T0, **enriched):
    a = make_activity(native_id=str(i), content=content, when=when)
    return a.with_enriched(EnrichedData(num_followers=followers, num_likes=likes, **enriched))


def test_method_catalogue():
    assert len(METHODS) == 15
    assert {m.category for m in METHODS.values()} == set(CATEGORIES)


def test_minmax_oracle():
    acts = [act(1, followers=10), act(2, followers=30), act(3, followers=20)]
    ctx = CorpusContext.build(acts)
    profile = WeightProfile({"followerCount": 1})
    assert [assess_activity(a, profile, ctx) for a in acts] == [0.0, 1.0, 0.5]


def test_degenerate_range_scores_zero():
    acts = [act(1, followers=5), act(2, followers=5)]
    ctx = CorpusContext.build(acts)
    assert assess_activity(acts[0], WeightProfile({"followerCount": 1}), ctx) == 0.0


def test_weighted_mean_oracle():
    media = MediaAttachment("image/jpeg", "photo", "u")
    a = act(1, media=media, embedded_urls=("x",))
    ctx = CorpusContext.build([a])
    profile = WeightProfile({"hasMediaFile": 3, "hasLocation": 1, "urlPresence": 0})
    assert assess_activity(a, profile, ctx) == 0.75


def test_language_and_tfidf():
    a = act(1, content="fire fire smoke", language="en", num_of_words=3)
    b = act(2, content="rain today", language="de", num_of_words=2)
    q = QueryContext.from_query(parse_query('fire NOT "rain"'), language="en")
    assert q.terms == ("fire",)
    ctx = CorpusContext.build([a, b], q)
    assert assess_activity(a, WeightProfile({"languageMatch": 1}), ctx, q) == 1.0
    assert assess_activity(b, WeightProfile({"languageMatch": 1}), ctx, q) == 0.0
    assert assess_activity(a, WeightProfile({"tfIdfScore": 1}), ctx, q) == 1.0
    assert assess_activity(b, WeightProfile({"tfIdfScore": 1}), ctx, q) == 0.0


@pytest.mark.parametrize("data, message", [
    ([], "JSON object"),
    ({"nope": 1}, "unknown assessment method"),
    ({"likeCount": -1}, "non-negative"),
    ({"likeCount": "2"}, "non-negative"),
    ({"likeCount": True}, "non-negative"),
    ({"likeCount": float("inf")}, "non-negative"),
])
def test_profile_validation(data, message):
    with pytest.raises(AssessmentError, match=message):
        WeightProfile.from_json(data)


def test_all_zero_profile_rejected():
    with pytest.raises(AssessmentError):
        rank_activities([act(1)], WeightProfile({"likeCount": 0}))
    with pytest.raises(AssessmentError):
        rank_activities([], WeightProfile({}))
    assert rank_activities([], WeightProfile({"likeCount": 1})) == []


def test_tie_break_newest_then_id():
    acts = [act("b", when=T0), act("a", when=T0), act("c", when=T0 + hours(1))]
    ranked = rank_activities(acts, WeightProfile({"hasMediaFile": 1}))
    assert [a.id for a, _ in ranked] == ["twitter:c", "twitter:a", "twitter:b"]


def _corpus(rng, n):
    return [
        act(i, content=" ".join(rng.choice(["fire", "flood", "the", "help"]) for _ in range(rng.randint(1, 8))),
            followers=rng.randint(0, 1000), likes=rng.randint(0, 50), when=T0 + hours(rng.randint(0, 100)),
            entropy=rng.random() * 4, abs_fear_factor=rng.randint(0, 3))
        for i in range(n)
    ]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([Fraction(1, 3), 2, 7, 0.5, 1000]))
def test_ranking_invariant_under_scaling(seed, factor):
    rng = random.Random(seed)
    acts = _corpus(rng, 30)
    chosen = rng.sample(sorted(METHODS), 4)
    weights = {m: rng.randint(1, 9) for m in chosen}
    base = rank_activities(acts, WeightProfile(weights))
    scaled = rank_activities(acts, WeightProfile({m: w * factor for m, w in weights.items()}))
    padded = rank_activities(acts, WeightProfile({**weights, **{m: 0 for m in METHODS if m not in weights}}))
    assert [a.id for a, _ in base] == [a.id for a, _ in scaled] == [a.id for a, _ in padded]
    assert [s for _, s in base] == [s for _, s in padded]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_every_method_in_unit_interval(seed):
    acts = _corpus(random.Random(seed), 12)
    q = QueryContext(("fire",), "en")
    ctx = CorpusContext.build(acts, q)
    for m in METHODS.values():
        for a in acts:
            assert 0.0 <= m.score(a, ctx, q) <= 1.0


def test_location_method():
    a = make_activity(location=GeoPoint(1.0, 2.0))
    assert assess_activity(a, WeightProfile({"hasLocation": 1}), CorpusContext.build([a])) == 1.0
