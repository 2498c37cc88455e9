"""Boolean rule-expression DSL: comparisons between feature names and
numeric literals, combined with &&, ||, ! and parentheses.

Parsing produces a small validated AST; type checking against the feature
catalog happens at load time so evaluation can never hit an unknown name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Union


class ExpressionError(ValueError):
    pass


@dataclass(frozen=True)
class Comparison:
    feature: str
    op: str  # < <= > >= == !=
    literal: Decimal


@dataclass(frozen=True)
class Not:
    operand: "Node"


@dataclass(frozen=True)
class And:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Or:
    left: "Node"
    right: "Node"


Node = Union[Comparison, Not, And, Or]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><=|>=|==|!=|<|>|&&|\|\||!|\(|\)))"
)

_COMPARATORS = {"<", "<=", ">", ">=", "==", "!="}


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ExpressionError(f"bad token at {text[pos:]!r}")
            break
        tokens.append(m.group("num") or m.group("ident") or m.group("op"))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ExpressionError("unexpected end of expression")
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise ExpressionError(f"expected {tok!r}, got {got!r}")

    def parse_or(self) -> Node:
        node = self.parse_and()
        while self.peek() == "||":
            self.next()
            node = Or(node, self.parse_and())
        return node

    def parse_and(self) -> Node:
        node = self.parse_unary()
        while self.peek() == "&&":
            self.next()
            node = And(node, self.parse_unary())
        return node

    def parse_unary(self) -> Node:
        if self.peek() == "!":
            self.next()
            return Not(self.parse_unary())
        if self.peek() == "(":
            self.next()
            node = self.parse_or()
            self.expect(")")
            return node
        return self.parse_comparison()

    def parse_comparison(self) -> Node:
        name = self.next()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise ExpressionError(f"expected feature name, got {name!r}")
        op = self.next()
        if op not in _COMPARATORS:
            raise ExpressionError(f"expected comparator, got {op!r}")
        lit = self.next()
        try:
            value = Decimal(lit)
        except Exception:
            raise ExpressionError(f"expected numeric literal, got {lit!r}") from None
        return Comparison(name, op, value)


def parse_expression(text: str) -> Node:
    tokens = _tokenize(text)
    if not tokens:
        raise ExpressionError("empty expression")
    parser = _Parser(tokens)
    node = parser.parse_or()
    if parser.peek() is not None:
        raise ExpressionError(f"trailing tokens starting at {parser.peek()!r}")
    return node


def variables(node: Node) -> set[str]:
    if isinstance(node, Comparison):
        return {node.feature}
    if isinstance(node, Not):
        return variables(node.operand)
    return variables(node.left) | variables(node.right)


def evaluate(node: Node, features: dict[str, Decimal]) -> bool:
    if isinstance(node, Comparison):
        value = features[node.feature]
        lit = node.literal
        if node.op == "<":
            return value < lit
        if node.op == "<=":
            return value <= lit
        if node.op == ">":
            return value > lit
        if node.op == ">=":
            return value >= lit
        if node.op == "==":
            return value == lit
        return value != lit
    if isinstance(node, Not):
        return not evaluate(node.operand, features)
    if isinstance(node, And):
        return evaluate(node.left, features) and evaluate(node.right, features)
    return evaluate(node.left, features) or evaluate(node.right, features)
