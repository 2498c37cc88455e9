import random
from datetime import datetime, timezone
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_ctx, make_txn
from ka_triage import intelligence
from ka_triage.features import FEATURE_KA, FeatureVector, segment
from ka_triage.intelligence import (
    RuleConfigError,
    TriggeredRule,
    assess,
    attribute,
    compile_rule,
    evaluate_rules,
    event_score,
    ka_score,
    load_rules,
    report_from_dict,
    report_to_dict,
)
from ka_triage.model import ACTIVITY, LOCATION, default_registry
from ka_triage.store import BlockEntry


def rule(rule_id, expression, severity):
    return compile_rule(rule_id, "", expression, Decimal(severity))


def triggered(expression, severity, rule_id="r"):
    r = rule(rule_id, expression, severity)
    return TriggeredRule(r, frozenset(FEATURE_KA[n] for n in r.variables))


# -- compilation and loading --------------------------------------------------


def test_compile_accepts_catalog_features():
    r = rule("r1", "amount_zscore > 3 && txn_count_90d > 2", "0.7")
    assert r.variables == ("amount_zscore", "txn_count_90d")


@pytest.mark.parametrize("severity", ["0", "-0.1", "1.01"])
def test_compile_rejects_bad_severity(severity):
    with pytest.raises(RuleConfigError):
        rule("r1", "amount_zscore > 3", severity)


def test_compile_rejects_unknown_feature():
    with pytest.raises(RuleConfigError, match="unknown feature"):
        rule("r1", "no_such_feature > 3", "0.5")


def test_compile_rejects_bad_expression():
    with pytest.raises(RuleConfigError):
        rule("r1", "amount_zscore >", "0.5")


def test_default_rule_file_loads():
    rules = load_rules()
    assert len(rules) >= 1
    assert len({r.rule_id for r in rules}) == len(rules)


def test_duplicate_rule_id_rejected(tmp_path):
    path = tmp_path / "rules.yaml"
    path.write_text(
        "- {rule_id: r1, expression: amount_zscore > 3, severity: 0.5}\n"
        "- {rule_id: r1, expression: is_new_country == 1, severity: 0.5}\n"
    )
    with pytest.raises(RuleConfigError, match="duplicate"):
        load_rules(path)


def test_non_list_rule_file_rejected(tmp_path):
    path = tmp_path / "rules.yaml"
    path.write_text("rule_id: r1\n")
    with pytest.raises(RuleConfigError):
        load_rules(path)


# -- evaluation and scoring ---------------------------------------------------


def _fv(**over):
    values = {name: Decimal(0) for name in FEATURE_KA}
    values.update({k: Decimal(v) for k, v in over.items()})
    return FeatureVector(values=values)


def test_evaluate_rules_preserves_file_order():
    rules = [
        rule("b_second", "is_new_country == 1", "0.5"),
        rule("a_first", "amount_zscore > 3", "0.5"),
    ]
    hits = evaluate_rules(_fv(is_new_country=1, amount_zscore=4), rules)
    assert [t.rule.rule_id for t in hits] == ["b_second", "a_first"]


def test_score_empty_is_zero():
    assert ka_score([], "activity") == 0


def test_score_single_rule_is_severity():
    hits = [triggered("amount_zscore > 3", "0.7")]
    assert ka_score(hits, "activity") == Decimal("0.7")


def test_score_two_halves_is_three_quarters():
    hits = [
        triggered("amount_zscore > 3", "0.5", "r1"),
        triggered("txn_count_90d > 5", "0.5", "r2"),
    ]
    assert ka_score(hits, "activity") == Decimal("0.75")


def test_score_three_rules_worked_example():
    # 1 - 0.6 * 0.7 * 0.8 = 0.664
    hits = [
        triggered("amount_zscore > 3", "0.4", "r1"),
        triggered("txn_count_90d > 5", "0.3", "r2"),
        triggered("max_amount_90d > 100", "0.2", "r3"),
    ]
    assert ka_score(hits, "activity") == Decimal("0.664")


def test_score_ignores_other_areas():
    hits = [triggered("is_new_country == 1", "0.8")]
    assert ka_score(hits, "activity") == 0
    assert ka_score(hits, "location") == Decimal("0.8")


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(min_value=1, max_value=100), min_size=0, max_size=8))
def test_score_bounds_and_order_invariance(percents):
    hits = [
        triggered("amount_zscore > 3", str(Decimal(p) / 100), f"r{i}")
        for i, p in enumerate(percents)
    ]
    score = ka_score(hits, "activity")
    assert Decimal(0) <= score <= Decimal(1)
    shuffled = list(hits)
    random.Random(0).shuffle(shuffled)
    assert ka_score(shuffled, "activity") == score
    # adding evidence never lowers the score
    more = hits + [triggered("txn_count_90d > 5", "0.3", "extra")]
    assert ka_score(more, "activity") >= score


# -- attribution --------------------------------------------------------------


def test_attribute_sums_severities_per_variable():
    hits = [
        triggered("amount_zscore > 3", "0.4", "r1"),
        triggered("amount_zscore > 3 && txn_count_90d > 5", "0.3", "r2"),
    ]
    assert attribute(hits, "activity") == [
        ("amount_zscore", Decimal("0.7")),
        ("txn_count_90d", Decimal("0.3")),
    ]


def test_attribute_breaks_ties_lexicographically():
    hits = [triggered("txn_count_90d > 5 && amount_zscore > 3", "0.4")]
    assert [n for n, _ in attribute(hits, "activity")] == ["amount_zscore", "txn_count_90d"]


def test_attribute_truncates_to_k():
    hits = [triggered("amount_zscore > 3 && txn_count_90d > 5 && max_amount_90d > 9 && mean_amount_90d > 1", "0.4")]
    assert len(attribute(hits, "activity", k=2)) == 2


def test_attribute_rejects_k_below_one():
    with pytest.raises(ValueError):
        attribute([], "activity", k=0)


def test_attribute_includes_cross_area_variables():
    # a rule spanning two areas contributes all of its variables to each
    hits = [triggered("is_new_country == 1 && amount_zscore > 3", "0.6")]
    assert attribute(hits, "location") == [
        ("amount_zscore", Decimal("0.6")),
        ("is_new_country", Decimal("0.6")),
    ]


@settings(max_examples=100, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.sets(st.sampled_from(sorted(FEATURE_KA)), min_size=1, max_size=4),
            st.integers(min_value=1, max_value=100),
        ),
        min_size=0,
        max_size=10,
    ),
    st.integers(min_value=1, max_value=5),
)
def test_attribute_matches_brute_force(specs, k):
    hits = []
    for i, (names, p) in enumerate(specs):
        expression = " && ".join(f"{n} > 0" for n in sorted(names))
        hits.append(triggered(expression, str(Decimal(p) / 100), f"r{i}"))
    for ka_id in set(FEATURE_KA.values()):
        got = attribute(hits, ka_id, k)
        # independent recompute in exact rationals
        totals: dict[str, Fraction] = {}
        for t in hits:
            if ka_id in t.kas:
                for name in t.rule.variables:
                    totals[name] = totals.get(name, Fraction(0)) + Fraction(
                        t.rule.severity.as_integer_ratio()[0],
                        t.rule.severity.as_integer_ratio()[1],
                    )
        expected = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
        assert [(n, Fraction(c.as_integer_ratio()[0], c.as_integer_ratio()[1])) for n, c in got] == expected


# -- assessment ---------------------------------------------------------------


def _views():
    history = [
        make_txn(f"h{i}", days_before=i + 1, amount="20.00") for i in range(6)
    ]
    ctx = make_ctx(make_txn("cur", amount="21.00", country="FR", city="Lyon"), history)
    return ctx, segment(ctx, default_registry())


def test_assess_flags_at_threshold():
    ctx, views = _views()
    rules = [rule("r1", "is_new_country == 1", "0.5")]
    reports = assess(ctx, views, rules)
    assert reports["location"].flagged is True
    assert reports["location"].score == Decimal("0.5")
    assert reports["activity"].flagged is False


def test_assess_below_threshold_has_no_attribution():
    ctx, views = _views()
    rules = [rule("r1", "is_new_country == 1", "0.4")]
    reports = assess(ctx, views, rules)
    assert reports["location"].flagged is False
    assert reports["location"].attributed_variables == ()
    assert reports["location"].score == Decimal("0.4")


def test_assess_blocklist_flags_without_score():
    ctx, views = _views()
    block = BlockEntry(
        subject_kind="user",
        subject_id="p1",
        justification_text="prior confirmed mule",
        justified_kas=(ACTIVITY,),
        added_at=datetime(2025, 1, 1, tzinfo=timezone.utc),
    )
    reports = assess(ctx, views, [], block=block)
    assert reports["activity"].flagged is True
    assert reports["activity"].blocklist_justified is True
    assert reports["activity"].score == 0
    assert reports["activity"].attributed_variables == ()
    assert reports["location"].flagged is False


def test_assess_custom_threshold():
    ctx, views = _views()
    rules = [rule("r1", "is_new_country == 1", "0.4")]
    reports = assess(ctx, views, rules, threshold=Decimal("0.3"))
    assert reports["location"].flagged is True
    assert len(reports["location"].attributed_variables) >= 1


def test_event_score_is_max():
    ctx, views = _views()
    rules = [
        rule("r1", "is_new_country == 1", "0.8"),
        rule("r2", "txn_count_90d > 2", "0.3"),
    ]
    reports = assess(ctx, views, rules)
    assert event_score(reports) == Decimal("0.8")
    assert event_score({}) == 0


def test_report_round_trip():
    ctx, views = _views()
    rules = [rule("r1", "is_new_country == 1 && amount_zscore >= 0", "0.6")]
    reports = assess(ctx, views, rules)
    original = reports["location"]
    back = report_from_dict(report_to_dict(original), LOCATION)
    assert back.score == original.score
    assert back.flagged == original.flagged
    assert back.attributed_variables == original.attributed_variables
    assert [t.rule.rule_id for t in back.triggered] == [
        t.rule.rule_id for t in original.triggered
    ]
    assert back.triggered[0].kas == original.triggered[0].kas
