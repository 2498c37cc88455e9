from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ka_triage.expr import (
    And,
    Comparison,
    ExpressionError,
    Not,
    Or,
    evaluate,
    parse_expression,
    variables,
)


def test_single_comparison():
    node = parse_expression("amount_zscore > 3")
    assert node == Comparison("amount_zscore", ">", Decimal(3))


def test_and_binds_tighter_than_or():
    node = parse_expression("a > 1 || b > 2 && c > 3")
    assert isinstance(node, Or)
    assert isinstance(node.right, And)


def test_parens_override_precedence():
    node = parse_expression("(a > 1 || b > 2) && c > 3")
    assert isinstance(node, And)
    assert isinstance(node.left, Or)


def test_not_applies_to_unary():
    node = parse_expression("!(a > 1) && b < 2")
    assert isinstance(node, And)
    assert isinstance(node.left, Not)


def test_decimal_literal():
    node = parse_expression("ratio <= 1.25")
    assert node.literal == Decimal("1.25")


@pytest.mark.parametrize(
    "text",
    [
        "",
        "a >",
        "a 1",
        "> 1",
        "a > b",
        "a > 1 &&",
        "a > 1 ||",
        "(a > 1",
        "a > 1)",
        "a > 1 b > 2",
        "a ~ 1",
    ],
)
def test_malformed_expressions_raise(text):
    with pytest.raises(ExpressionError):
        parse_expression(text)


def test_variables_collects_all_names():
    node = parse_expression("a > 1 && (b < 2 || !(c == 3))")
    assert variables(node) == {"a", "b", "c"}


@pytest.mark.parametrize(
    "op,value,lit,expected",
    [
        ("<", "1", "2", True),
        ("<=", "2", "2", True),
        (">", "2", "2", False),
        (">=", "2", "2", True),
        ("==", "2.0", "2", True),
        ("!=", "2", "2", False),
    ],
)
def test_comparison_semantics(op, value, lit, expected):
    node = parse_expression(f"x {op} {lit}")
    assert evaluate(node, {"x": Decimal(value)}) is expected


def test_boolean_connectives():
    env = {"a": Decimal(1), "b": Decimal(0)}
    assert evaluate(parse_expression("a == 1 && b == 0"), env) is True
    assert evaluate(parse_expression("a == 0 || b == 0"), env) is True
    assert evaluate(parse_expression("!(a == 1)"), env) is False


@given(
    st.decimals(allow_nan=False, allow_infinity=False, places=2, min_value=-999, max_value=999),
    st.decimals(allow_nan=False, allow_infinity=False, places=2, min_value=0, max_value=999),
    st.sampled_from(["<", "<=", ">", ">=", "==", "!="]),
)
def test_comparison_matches_decimal_semantics(value, lit, op):
    node = parse_expression(f"x {op} {lit}")
    expected = {
        "<": value < lit,
        "<=": value <= lit,
        ">": value > lit,
        ">=": value >= lit,
        "==": value == lit,
        "!=": value != lit,
    }[op]
    assert evaluate(node, {"x": value}) is expected


@given(st.booleans(), st.booleans(), st.booleans())
def test_demorgan(a, b, c):
    env = {"a": Decimal(int(a)), "b": Decimal(int(b)), "c": Decimal(int(c))}
    lhs = parse_expression("!(a == 1 && b == 1)")
    rhs = parse_expression("!(a == 1) || !(b == 1)")
    assert evaluate(lhs, env) == evaluate(rhs, env)
