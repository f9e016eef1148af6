"""Tailorable quality assessment: weighted combination of per-activity scorers.

Fifteen assessment methods in four categories (metadata, content,
classification, scientific) each map an enriched activity to [0, 1]. Raw
attributes are min-max normalized over the result set being assessed, so
scores are comparable within one query. A user-supplied weight profile picks
and weights methods; the combined score is the weighted mean.

Weighted means are computed in exact rational arithmetic so that scaling all
weights by the same exact factor yields bit-identical scores and rankings.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional

from .activity import Activity
from .query import Node, literals

CATEGORIES = ("metadata", "content", "classification", "scientific")

_WORD = re.compile(r"\w+")


class AssessmentError(ValueError):
    pass


def _words(text: str) -> list[str]:
    return [w.lower() for w in _WORD.findall(text or "")]


@dataclass(frozen=True)
class QueryContext:
    terms: tuple = ()
    language: Optional[str] = None

    @classmethod
    def from_query(cls, node: Optional[Node], language: Optional[str] = None) -> "QueryContext":
        if node is None:
            return cls(language=language)
        words: list[str] = []
        for lit in literals(node, negated=False):
            words.extend(_words(lit.text))
        return cls(tuple(dict.fromkeys(words)), language)


def _num_words(a: Activity) -> int:
    n = a.enriched.num_of_words
    return n if n is not None else len((a.content or "").split())


def term_frequency(term: str, a: Activity) -> float:
    n = _num_words(a)
    if n == 0:
        return 0.0
    return _words(a.content).count(term.lower()) / n


@dataclass
class CorpusContext:
    """Result-set statistics used to normalize raw attributes."""

    size: int
    document_frequency: Counter
    ranges: dict = field(default_factory=dict)  # attribute -> (min, max)
    tf_idf_max: float = 0.0

    def __post_init__(self):
        if self.size < 1:
            raise AssessmentError("corpus context needs at least one activity")

    def df(self, term: str) -> int:
        return self.document_frequency.get(term.lower(), 0)

    def idf(self, term: str) -> float:
        return math.log((1 + self.size) / (1 + self.df(term))) + 1.0

    def minmax(self, attribute: str, value: float) -> float:
        lo, hi = self.ranges.get(attribute, (0.0, 0.0))
        if hi <= lo:
            return 0.0
        return (value - lo) / (hi - lo)

    @classmethod
    def build(cls, activities: Iterable[Activity], query: Optional[QueryContext] = None) -> "CorpusContext":
        activities = list(activities)
        query = query or QueryContext()
        df: Counter = Counter()
        for a in activities:
            df.update(set(_words(a.content)))
        ctx = cls(len(activities), df)
        raw = {name: [] for name in RAW_ATTRIBUTES}
        tfidf = []
        for a in activities:
            for name, getter in RAW_ATTRIBUTES.items():
                raw[name].append(getter(a, query))
            tfidf.append(tf_idf_sum(query.terms, a, ctx))
        ctx.ranges = {name: (min(vals), max(vals)) for name, vals in raw.items()}
        ctx.tf_idf_max = max(tfidf, default=0.0)
        return ctx


def tf_idf(term: str, a: Activity, ctx: CorpusContext) -> float:
    tf = term_frequency(term, a)
    return tf * ctx.idf(term) if tf else 0.0


def tf_idf_sum(terms: Iterable[str], a: Activity, ctx: CorpusContext) -> float:
    return math.fsum(tf_idf(t, a, ctx) for t in terms)


def _or0(value) -> float:
    return float(value) if value is not None else 0.0


def _query_term_frequency(a: Activity, q: QueryContext) -> float:
    return math.fsum(term_frequency(t, a) for t in q.terms)


def _timestamp(a: Activity) -> float:
    st = a.object.start_time
    return st.timestamp() if isinstance(st, datetime) else 0.0


RAW_ATTRIBUTES: dict[str, Callable[[Activity, QueryContext], float]] = {
    "followers": lambda a, q: _or0(a.enriched.num_followers),
    "likes": lambda a, q: _or0(a.enriched.num_likes),
    "retweets": lambda a, q: _or0(a.enriched.num_retweets),
    "words": lambda a, q: float(_num_words(a)),
    "syllables": lambda a, q: _or0(a.enriched.syllables_per_word),
    "happiness": lambda a, q: _or0(a.enriched.abs_happiness_factor),
    "fear": lambda a, q: _or0(a.enriched.abs_fear_factor),
    "entropy": lambda a, q: _or0(a.enriched.entropy),
    "recency": lambda a, q: _timestamp(a),
    "queryTerms": _query_term_frequency,
}


@dataclass(frozen=True)
class AssessmentMethod:
    id: str
    category: str
    scorer: Callable[[Activity, CorpusContext, QueryContext], float]

    def score(self, a: Activity, ctx: CorpusContext, q: QueryContext) -> float:
        value = float(self.scorer(a, ctx, q))
        if math.isnan(value):
            return 0.0
        return min(1.0, max(0.0, value))


def _normalized(attribute: str, invert: bool = False):
    def scorer(a, ctx, q):
        value = ctx.minmax(attribute, RAW_ATTRIBUTES[attribute](a, q))
        return 1.0 - value if invert else value

    return scorer


def _language_match(a, ctx, q):
    lang = a.enriched.language
    if q.language:
        return 1.0 if lang == q.language else 0.0
    return 1.0 if lang and lang != "und" else 0.0


def _tf_idf_score(a, ctx, q):
    if ctx.tf_idf_max <= 0:
        return 0.0
    return tf_idf_sum(q.terms, a, ctx) / ctx.tf_idf_max


METHODS: dict[str, AssessmentMethod] = {
    m.id: m
    for m in (
        AssessmentMethod("followerCount", "metadata", _normalized("followers")),
        AssessmentMethod("likeCount", "metadata", _normalized("likes")),
        AssessmentMethod("retweetCount", "metadata", _normalized("retweets")),
        AssessmentMethod("hasMediaFile", "metadata", lambda a, c, q: float(a.enriched.media is not None)),
        AssessmentMethod("hasLocation", "metadata", lambda a, c, q: float(a.object.location is not None)),
        AssessmentMethod("queryTermFrequency", "content", _normalized("queryTerms")),
        AssessmentMethod("lengthScore", "content", _normalized("words")),
        AssessmentMethod("readability", "content", _normalized("syllables", invert=True)),
        AssessmentMethod("urlPresence", "content", lambda a, c, q: float(bool(a.enriched.embedded_urls))),
        AssessmentMethod("happinessScore", "classification", _normalized("happiness")),
        AssessmentMethod("fearScore", "classification", _normalized("fear", invert=True)),
        AssessmentMethod("languageMatch", "classification", _language_match),
        AssessmentMethod("tfIdfScore", "scientific", _tf_idf_score),
        AssessmentMethod("entropyScore", "scientific", _normalized("entropy")),
        AssessmentMethod("recencyScore", "scientific", _normalized("recency")),
    )
}


@dataclass(frozen=True)
class WeightProfile:
    weights: Mapping[str, float]

    @classmethod
    def from_json(cls, data, methods: Mapping[str, AssessmentMethod] = METHODS) -> "WeightProfile":
        if not isinstance(data, dict):
            raise AssessmentError("weight profile must be a JSON object of method -> weight")
        weights = {}
        for key, value in data.items():
            if key not in methods:
                raise AssessmentError(f"unknown assessment method {key!r}")
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value) or value < 0:
                raise AssessmentError(f"weight for {key!r} must be a non-negative number")
            weights[key] = value
        return cls(weights)

    def active(self) -> dict:
        return {k: Fraction(v) for k, v in self.weights.items() if v > 0}


def _exact_score(a, profile, ctx, q, methods) -> Fraction:
    active = profile.active()
    if not active:
        raise AssessmentError("no methods selected")
    total = sum(active.values())
    acc = Fraction(0)
    for method_id, w in active.items():
        try:
            method = methods[method_id]
        except KeyError:
            raise AssessmentError(f"unknown assessment method {method_id!r}") from None
        acc += w * Fraction(method.score(a, ctx, q))
    return acc / total


def assess_activity(
    a: Activity,
    profile: WeightProfile,
    ctx: CorpusContext,
    q: Optional[QueryContext] = None,
    methods: Mapping[str, AssessmentMethod] = METHODS,
) -> float:
    return float(_exact_score(a, profile, ctx, q or QueryContext(), methods))


def rank_activities(
    activities: Iterable[Activity],
    profile: WeightProfile,
    ctx: Optional[CorpusContext] = None,
    q: Optional[QueryContext] = None,
    methods: Mapping[str, AssessmentMethod] = METHODS,
) -> list[tuple[Activity, float]]:
    """Activities paired with their scores, best first.

    Ties go to the newer activity, then to the smaller canonical id.
    """
    activities = list(activities)
    if not activities:
        if not profile.active():
            raise AssessmentError("no methods selected")
        return []
    q = q or QueryContext()
    ctx = ctx or CorpusContext.build(activities, q)
    scored = [(a, _exact_score(a, profile, ctx, q, methods)) for a in activities]
    scored.sort(key=lambda pair: (-pair[1], -_timestamp(pair[0]), pair[0].id))
    return [(a, float(s)) for a, s in scored]
