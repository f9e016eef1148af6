"""Unified keyword query language: parsing, DNF, per-platform rewriting."""

from .ast import And, Node, Not, Or, Phrase, Term, evaluate_match, literal_matches, literals, normalize, to_text
from .dnf import MAX_DISJUNCTS, Conjunct, Dnf, QueryTooExpensive, UnsupportedQuery, to_dnf
from .parser import QueryParseError, parse_query
from .plan import (
    ALL_OPERATORS,
    NativeRequest,
    PlatformCapabilities,
    PostFilter,
    RewritePlan,
    estimate_cost,
    rewrite_for_platform,
)

__all__ = [
    "ALL_OPERATORS", "And", "Conjunct", "Dnf", "MAX_DISJUNCTS", "NativeRequest",
    "Node", "Not", "Or", "Phrase", "PlatformCapabilities", "PostFilter", "QueryParseError",
    "QueryTooExpensive", "RewritePlan", "Term", "UnsupportedQuery", "estimate_cost",
    "evaluate_match", "literal_matches", "literals", "normalize", "parse_query", "rewrite_for_platform",
    "to_dnf", "to_text",
]
