"""Recursive-descent parser for the unified keyword query syntax.

Grammar (uppercase keywords are operators, adjacency means AND)::

    query   := or_expr EOF
    or_expr := and_expr ("OR" and_expr)*
    and_expr:= not_expr (["AND"] not_expr)*
    not_expr:= "NOT" not_expr | primary
    primary := WORD | '"' text '"' | "(" or_expr ")"
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import OPERATORS, And, Node, Not, Or, Phrase, Term, normalize


class QueryParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Token:
    kind: str  # WORD, PHRASE, OP, LPAREN, RPAREN, EOF
    value: str
    pos: int


_DELIMS = set('()"')


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == "(":
            tokens.append(Token("LPAREN", ch, i))
            i += 1
        elif ch == ")":
            tokens.append(Token("RPAREN", ch, i))
            i += 1
        elif ch == '"':
            end = text.find('"', i + 1)
            if end < 0:
                raise QueryParseError("unterminated phrase", i)
            body = text[i + 1:end]
            if not body.strip():
                raise QueryParseError("empty phrase", i)
            tokens.append(Token("PHRASE", body, i))
            i = end + 1
        else:
            start = i
            while i < n and not text[i].isspace() and text[i] not in _DELIMS:
                i += 1
            word = text[start:i]
            tokens.append(Token("OP" if word in OPERATORS else "WORD", word, start))
    tokens.append(Token("EOF", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def is_op(self, name: str) -> bool:
        return self.tok.kind == "OP" and self.tok.value == name

    def starts_operand(self) -> bool:
        t = self.tok
        return t.kind in ("WORD", "PHRASE", "LPAREN") or (t.kind == "OP" and t.value == "NOT")

    def operand_after(self, op: Token) -> None:
        if not self.starts_operand():
            raise QueryParseError(f"dangling operator {op.value}", op.pos)

    def parse_or(self) -> Node:
        parts = [self.parse_and()]
        while self.is_op("OR"):
            op = self.take()
            self.operand_after(op)
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def parse_and(self) -> Node:
        parts = [self.parse_not()]
        while True:
            if self.is_op("AND"):
                op = self.take()
                self.operand_after(op)
            elif not self.starts_operand():
                break
            parts.append(self.parse_not())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def parse_not(self) -> Node:
        if self.is_op("NOT"):
            op = self.take()
            self.operand_after(op)
            return Not(self.parse_not())
        return self.parse_primary()

    def parse_primary(self) -> Node:
        t = self.tok
        if t.kind == "WORD":
            self.take()
            return Term(t.value)
        if t.kind == "PHRASE":
            self.take()
            return Phrase(t.value)
        if t.kind == "LPAREN":
            self.take()
            if self.tok.kind == "RPAREN":
                raise QueryParseError("empty parentheses", t.pos)
            inner = self.parse_or()
            if self.tok.kind != "RPAREN":
                raise QueryParseError("unbalanced parenthesis", t.pos)
            self.take()
            return inner
        if t.kind == "RPAREN":
            raise QueryParseError("unbalanced parenthesis", t.pos)
        if t.kind == "OP":
            raise QueryParseError(f"dangling operator {t.value}", t.pos)
        raise QueryParseError("unexpected end of query", t.pos)


def parse_query(text: str) -> Node:
    """Parse ``text`` into a normalized query tree.

    >>> parse_query("flood NOT drill")
    And(children=(Term(text='flood'), Not(child=Term(text='drill'))))
    """
    if not text or not text.strip():
        raise QueryParseError("empty query", 0)
    p = _Parser(tokenize(text))
    node = p.parse_or()
    if p.tok.kind != "EOF":
        raise QueryParseError("unbalanced parenthesis" if p.tok.kind == "RPAREN" else "unexpected token", p.tok.pos)
    return normalize(node)
