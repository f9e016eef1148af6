"""Query syntax tree, reference evaluator and printer."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Union


@dataclass(frozen=True)
class Term:
    text: str


@dataclass(frozen=True)
class Phrase:
    text: str


@dataclass(frozen=True)
class And:
    children: tuple


@dataclass(frozen=True)
class Or:
    children: tuple


@dataclass(frozen=True)
class Not:
    child: "Node"


Literal = Union[Term, Phrase]
Node = Union[Term, Phrase, And, Or, Not]

OPERATORS = frozenset({"AND", "OR", "NOT"})


@lru_cache(maxsize=4096)
def _literal_pattern(kind: type, text: str) -> re.Pattern:
    if kind is Phrase:
        body = r"\s+".join(re.escape(w) for w in text.split())
    else:
        body = re.escape(text)
    # Word boundaries that also work for terms starting/ending with non-word chars (#tag, @user).
    return re.compile(rf"(?<!\w){body}(?!\w)", re.IGNORECASE)


def literal_matches(literal: Literal, text: str) -> bool:
    """Case-insensitive, word-bounded match of a term or an exact phrase."""
    return _literal_pattern(type(literal), literal.text).search(text) is not None


def evaluate_match(node: Node, text: str) -> bool:
    if isinstance(node, (Term, Phrase)):
        return literal_matches(node, text)
    if isinstance(node, And):
        return all(evaluate_match(c, text) for c in node.children)
    if isinstance(node, Or):
        return any(evaluate_match(c, text) for c in node.children)
    if isinstance(node, Not):
        return not evaluate_match(node.child, text)
    raise TypeError(f"not a query node: {node!r}")


def literals(node: Node, negated: bool = True) -> list:
    """Distinct literals in first-appearance order.

    With ``negated=False`` only literals under an even number of NOTs are kept.
    """
    seen: dict = {}

    def walk(n, neg):
        if isinstance(n, (Term, Phrase)):
            if negated or not neg:
                seen.setdefault(n, None)
        elif isinstance(n, Not):
            walk(n.child, not neg)
        else:
            for c in n.children:
                walk(c, neg)

    walk(node, False)
    return list(seen)


def normalize(node: Node) -> Node:
    """Flatten nested same-kind operators and drop double negation."""
    if isinstance(node, Not):
        inner = normalize(node.child)
        return inner.child if isinstance(inner, Not) else Not(inner)
    if isinstance(node, (And, Or)):
        kind = type(node)
        flat = []
        for c in node.children:
            c = normalize(c)
            flat.extend(c.children if isinstance(c, kind) else (c,))
        return flat[0] if len(flat) == 1 else kind(tuple(flat))
    return node


def to_text(node: Node) -> str:
    """Render a node in the unified syntax; ``parse_query(to_text(n))`` gives ``n`` back."""
    if isinstance(node, Term):
        return node.text
    if isinstance(node, Phrase):
        return f'"{node.text}"'
    if isinstance(node, Not):
        inner = to_text(node.child)
        if isinstance(node.child, (And, Or)):
            inner = f"({inner})"
        return f"NOT {inner}"
    if isinstance(node, And):
        parts = [f"({to_text(c)})" if isinstance(c, (And, Or)) else to_text(c) for c in node.children]
        return " AND ".join(parts)
    if isinstance(node, Or):
        parts = [f"({to_text(c)})" if isinstance(c, (And, Or)) else to_text(c) for c in node.children]
        return " OR ".join(parts)
    raise TypeError(f"not a query node: {node!r}")
