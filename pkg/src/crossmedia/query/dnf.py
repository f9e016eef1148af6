"""Disjunctive normal form: the OR-of-ANDs shape used to fan a query out."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .ast import And, Node, Not, Or, Phrase, Term, literal_matches

MAX_DISJUNCTS = 64


class UnsupportedQuery(ValueError):
    """The query cannot be executed against any platform search."""


class QueryTooExpensive(UnsupportedQuery):
    """DNF expansion exceeds the disjunct limit."""


@dataclass(frozen=True, eq=False)
class Conjunct:
    positive: tuple
    negative: tuple = ()

    def key(self):
        return frozenset(self.positive), frozenset(self.negative)

    def __eq__(self, other):
        return isinstance(other, Conjunct) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def matches(self, text: str) -> bool:
        return all(literal_matches(l, text) for l in self.positive) and not any(
            literal_matches(l, text) for l in self.negative
        )

    def to_ast(self) -> Node:
        parts = list(self.positive) + [Not(l) for l in self.negative]
        return parts[0] if len(parts) == 1 else And(tuple(parts))


@dataclass(frozen=True)
class Dnf:
    disjuncts: tuple

    def __len__(self) -> int:
        return len(self.disjuncts)

    def matches(self, text: str) -> bool:
        return any(c.matches(text) for c in self.disjuncts)

    def to_ast(self) -> Node:
        parts = [c.to_ast() for c in self.disjuncts]
        return parts[0] if len(parts) == 1 else Or(tuple(parts))


def _ordered_union(a: tuple, b: tuple) -> tuple:
    return tuple(dict.fromkeys(a + b))


def _dedupe(conjuncts) -> list:
    return list(dict.fromkeys(conjuncts))


def _expand(node: Node, negated: bool) -> list:
    if isinstance(node, (Term, Phrase)):
        return [Conjunct((), (node,))] if negated else [Conjunct((node,))]
    if isinstance(node, Not):
        return _expand(node.child, not negated)
    # De Morgan: a negated AND behaves as an OR of negations and vice versa.
    is_or = isinstance(node, Or) != negated
    parts = [_expand(c, negated) for c in node.children]
    if is_or:
        out = _dedupe(c for part in parts for c in part)
    else:
        out = [Conjunct(())]
        for part in parts:
            out = _dedupe(
                Conjunct(_ordered_union(a.positive, b.positive), _ordered_union(a.negative, b.negative))
                for a, b in product(out, part)
            )
            if len(out) > MAX_DISJUNCTS:
                break
    if len(out) > MAX_DISJUNCTS:
        raise QueryTooExpensive(f"query expands to more than {MAX_DISJUNCTS} native requests")
    return out


def to_dnf(node: Node) -> Dnf:
    conjuncts = _expand(node, False)
    for c in conjuncts:
        if not c.positive:
            raise UnsupportedQuery("query has a branch without any positive keyword")
    return Dnf(tuple(conjuncts))
