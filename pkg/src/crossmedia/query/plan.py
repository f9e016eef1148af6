"""Per-platform execution plans for a unified query.

A plan is a list of native requests (what the platform API can express) plus
a residual post-filter that removes gathered items the native search could not
exclude. Executing the requests and applying the residual gives exactly the
set of items the unified query matches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..geo import GeoCircle, TimeWindow
from .ast import And, Node, Phrase, Term, evaluate_match, to_text
from .dnf import Conjunct, Dnf

AND, OR, NOT, PHRASE = "AND", "OR", "NOT", "PHRASE"
ALL_OPERATORS = frozenset({AND, OR, NOT, PHRASE})


@dataclass(frozen=True)
class PlatformCapabilities:
    operators: frozenset = ALL_OPERATORS
    native_geo_filter: bool = False
    native_time_filter: bool = False
    keyword_search: bool = True
    max_results_per_request: int = 100

    def __post_init__(self):
        object.__setattr__(self, "operators", frozenset(self.operators))
        if not self.keyword_search and self.operators:
            raise ValueError("tag-only platforms support no query operators")
        unknown = self.operators - ALL_OPERATORS
        if unknown:
            raise ValueError(f"unknown operators: {sorted(unknown)}")
        if self.max_results_per_request < 1:
            raise ValueError("maxResultsPerRequest must be at least 1")

    @property
    def full_boolean(self) -> bool:
        return self.keyword_search and {AND, OR, NOT} <= self.operators

    def to_dict(self) -> dict:
        return {
            "operators": sorted(self.operators),
            "nativeGeoFilter": self.native_geo_filter,
            "nativeTimeFilter": self.native_time_filter,
            "keywordSearch": self.keyword_search,
            "maxResultsPerRequest": self.max_results_per_request,
        }


@dataclass(frozen=True)
class NativeRequest:
    keyword_string: str
    conjunct_index: int
    geo: Optional[GeoCircle] = None
    time_window: Optional[TimeWindow] = None

    def to_dict(self) -> dict:
        out = {"keywordString": self.keyword_string, "conjunctIndex": self.conjunct_index}
        if self.geo:
            out["geo"] = self.geo.to_dict()
        if self.time_window:
            out["timeWindow"] = self.time_window.to_dict()
        return out


@dataclass(frozen=True)
class PostFilter:
    must_match: Optional[Node] = None
    geo: Optional[GeoCircle] = None
    time_window: Optional[TimeWindow] = None

    @property
    def empty(self) -> bool:
        return self.must_match is None and self.geo is None and self.time_window is None

    def accepts(self, text: str, latitude=None, longitude=None, when=None) -> bool:
        if self.must_match is not None and not evaluate_match(self.must_match, text):
            return False
        if self.geo is not None and not self.geo.contains(latitude, longitude):
            return False
        if self.time_window is not None and not self.time_window.contains(when):
            return False
        return True

    def to_dict(self) -> dict:
        return {
            "mustMatch": to_text(self.must_match) if self.must_match is not None else None,
            "geo": self.geo.to_dict() if self.geo else None,
            "timeWindow": self.time_window.to_dict() if self.time_window else None,
        }


@dataclass(frozen=True)
class RewritePlan:
    native_requests: tuple
    post_filter: PostFilter = field(default_factory=PostFilter)

    @property
    def estimated_request_units(self) -> int:
        return len(self.native_requests)

    def to_dict(self) -> dict:
        return {
            "nativeRequests": [r.to_dict() for r in self.native_requests],
            "postFilter": self.post_filter.to_dict(),
            "estimatedRequestUnits": self.estimated_request_units,
        }


def _phrase_words(p: Phrase) -> list[Term]:
    return [Term(w) for w in p.text.split()]


def _degrade_phrases(node: Node) -> tuple[Node, bool]:
    """Replace phrases by the AND of their words (a necessary condition)."""
    if isinstance(node, Phrase):
        words = _phrase_words(node)
        return (words[0] if len(words) == 1 else And(tuple(words))), True
    if isinstance(node, Term):
        return node, False
    if hasattr(node, "child"):
        inner, changed = _degrade_phrases(node.child)
        return type(node)(inner), changed
    pairs = [_degrade_phrases(c) for c in node.children]
    return type(node)(tuple(p for p, _ in pairs)), any(c for _, c in pairs)


def _has_negated_phrase(node: Node, negated: bool = False) -> bool:
    if isinstance(node, Phrase):
        return negated
    if isinstance(node, Term):
        return False
    if hasattr(node, "child"):
        return _has_negated_phrase(node.child, not negated)
    return any(_has_negated_phrase(c, negated) for c in node.children)


def _and_request(c: Conjunct, phrases_native: bool) -> tuple[str, list]:
    """Keyword string of the positives, plus the parts left for post-filtering."""
    words, residual = [], []
    for lit in c.positive:
        if isinstance(lit, Phrase) and not phrases_native:
            words.extend(t.text for t in _phrase_words(lit))
            residual.append(lit)
        elif isinstance(lit, Phrase):
            words.append(f'"{lit.text}"')
        else:
            words.append(lit.text)
    residual.extend(Conjunct((), (n,)).to_ast() for n in c.negative)
    return " ".join(dict.fromkeys(words)), residual


def rewrite_for_platform(
    dnf: Dnf,
    caps: PlatformCapabilities,
    *,
    query: Optional[Node] = None,
    geo: Optional[GeoCircle] = None,
    time_window: Optional[TimeWindow] = None,
) -> RewritePlan:
    """Translate a query into native requests and a residual post-filter.

    ``query`` is the original tree; full-boolean platforms receive it verbatim
    (it is usually shorter than its DNF). Without it the DNF is printed.
    """
    if not dnf.disjuncts:
        raise ValueError("empty query plan")
    if time_window is not None and time_window.unbounded:
        time_window = None
    native_geo = geo if caps.native_geo_filter else None
    native_time = time_window if caps.native_time_filter else None
    post_geo = None if caps.native_geo_filter else geo
    post_time = None if caps.native_time_filter else time_window
    full = query if query is not None else dnf.to_ast()

    def req(text: str, idx: int) -> NativeRequest:
        return NativeRequest(text, idx, native_geo, native_time)

    if caps.full_boolean:
        residual = None
        if PHRASE not in caps.operators:
            degraded, changed = _degrade_phrases(full)
            if _has_negated_phrase(full):
                # NOT (a AND b) would also drop items holding the words apart; send positives only.
                degraded, _ = _degrade_phrases(Dnf(tuple(Conjunct(c.positive) for c in dnf.disjuncts)).to_ast())
            if changed:
                residual = full
            full_text = to_text(degraded)
        else:
            full_text = to_text(full)
        requests = (req(full_text, 0),)
        return RewritePlan(requests, PostFilter(residual, post_geo, post_time))

    if not caps.keyword_search:
        tags: dict[str, int] = {}
        for idx, c in enumerate(dnf.disjuncts):
            for lit in c.positive:
                # Any word of a phrase is a necessary tag; the residual checks the phrase itself.
                word = _phrase_words(lit)[0].text if isinstance(lit, Phrase) else lit.text
                tags.setdefault(word.lower(), idx)
        requests = tuple(req(tag, idx) for tag, idx in tags.items())
        return RewritePlan(requests, PostFilter(full, post_geo, post_time))

    # Conjunction-only search: one request per disjunct, negatives filtered locally.
    phrases_native = PHRASE in caps.operators
    seen: dict[str, NativeRequest] = {}
    residuals = []
    for idx, c in enumerate(dnf.disjuncts):
        text, residual = _and_request(c, phrases_native)
        if AND not in caps.operators and len(text.split()) > 1:
            # Single-keyword search: send the first word, check the rest locally.
            text, residual = text.split()[0].strip('"'), [c.to_ast()]
        seen.setdefault(text, req(text, idx))
        residuals.append(residual)
    must_match = None
    if any(residuals):
        if len(dnf.disjuncts) == 1:
            parts = residuals[0]
            must_match = parts[0] if len(parts) == 1 else And(tuple(parts))
        else:
            must_match = full
    return RewritePlan(tuple(seen.values()), PostFilter(must_match, post_geo, post_time))


def estimate_cost(plan: RewritePlan, pages_per_request: int = 1) -> int:
    if pages_per_request < 1:
        raise ValueError("pagesPerRequest must be at least 1")
    return len(plan.native_requests) * pages_per_request
