"""Rule evaluation, per-area risk scoring, flagging, and top-k attribution.

Scores combine triggered-rule severities with a noisy-OR, so they stay in
[0,1], never decrease when evidence is added, and ignore rule order.
Blocklist justifications flag their areas directly without contributing
score.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Optional

import yaml

from . import expr
from .features import FEATURE_KA, FeatureVector, KnowledgeAreaView
from .model import AlertContext, KnowledgeAreaId
from .store import BlockEntry

DEFAULT_THRESHOLD = Decimal("0.5")
DEFAULT_TOP_K = 3

DEFAULT_RULES_PATH = Path(__file__).with_name("default_rules.yaml")


class RuleConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    rule_id: str
    description: str
    expression: str
    severity: Decimal
    variables: tuple[str, ...]
    ast: expr.Node = field(compare=False, hash=False, default=None)


@dataclass(frozen=True)
class TriggeredRule:
    rule: Rule
    kas: frozenset[str]


@dataclass(frozen=True)
class RiskReport:
    ka: KnowledgeAreaId
    score: Decimal
    flagged: bool
    attributed_variables: tuple[tuple[str, Decimal], ...]
    triggered: tuple[TriggeredRule, ...]
    blocklist_justified: bool = False


def compile_rule(rule_id: str, description: str, expression: str, severity: Decimal) -> Rule:
    if not (Decimal(0) < severity <= Decimal(1)):
        raise RuleConfigError(f"rule {rule_id!r}: severity must be in (0,1], got {severity}")
    try:
        ast = expr.parse_expression(expression)
    except expr.ExpressionError as e:
        raise RuleConfigError(f"rule {rule_id!r}: {e}") from e
    names = sorted(expr.variables(ast))
    unknown = [n for n in names if n not in FEATURE_KA]
    if unknown:
        raise RuleConfigError(f"rule {rule_id!r}: unknown feature(s) {unknown}")
    return Rule(rule_id, description, expression, severity, tuple(names), ast)


def load_rules(path: str | Path | None = None) -> list[Rule]:
    """Load and type-check a YAML rule file; bad references fail here, never
    at evaluation time."""
    path = Path(path) if path else DEFAULT_RULES_PATH
    doc = yaml.safe_load(path.read_text())
    if not isinstance(doc, list):
        raise RuleConfigError("rule file must be a list of rules")
    rules = []
    seen = set()
    for entry in doc:
        rule_id = str(entry["rule_id"])
        if rule_id in seen:
            raise RuleConfigError(f"duplicate rule_id {rule_id!r}")
        seen.add(rule_id)
        rules.append(
            compile_rule(
                rule_id,
                str(entry.get("description", "")),
                str(entry["expression"]),
                Decimal(str(entry["severity"])),
            )
        )
    return rules


def evaluate_rules(features: FeatureVector, rules: list[Rule]) -> list[TriggeredRule]:
    """Rules whose expression holds on the features, in rule-file order."""
    triggered = []
    for rule in rules:
        if expr.evaluate(rule.ast, features.values):
            kas = frozenset(FEATURE_KA[name] for name in rule.variables)
            triggered.append(TriggeredRule(rule, kas))
    return triggered


def ka_score(triggered: list[TriggeredRule], ka_id: str) -> Decimal:
    """Noisy-OR over severities of triggered rules touching the area."""
    miss = Decimal(1)
    for t in triggered:
        if ka_id in t.kas:
            miss *= Decimal(1) - t.rule.severity
    return Decimal(1) - miss


def attribute(
    triggered: list[TriggeredRule], ka_id: str, k: int = DEFAULT_TOP_K
) -> list[tuple[str, Decimal]]:
    """Top-k variables by summed severity of the area's triggered rules.

    Ties break lexicographically by feature name.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    contributions: dict[str, Decimal] = {}
    for t in triggered:
        if ka_id not in t.kas:
            continue
        for name in t.rule.variables:
            contributions[name] = contributions.get(name, Decimal(0)) + t.rule.severity
    ranked = sorted(contributions.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]


def assess(
    ctx: AlertContext,
    views: dict[str, KnowledgeAreaView],
    rules: list[Rule],
    threshold: Decimal = DEFAULT_THRESHOLD,
    k: int = DEFAULT_TOP_K,
    block: Optional[BlockEntry] = None,
) -> dict[str, RiskReport]:
    """Per-area risk reports for one alert.

    Areas named in a blocklist justification are flagged regardless of
    score; the blocklist contributes no score of its own.
    """
    all_features = FeatureVector(
        values={n: v for view in views.values() for n, v in view.features.items()}
    )
    triggered = evaluate_rules(all_features, rules)
    justified_ids = {ka.id for ka in block.justified_kas} if block else set()

    reports: dict[str, RiskReport] = {}
    for ka_id, view in views.items():
        relevant = tuple(t for t in triggered if ka_id in t.kas)
        score = ka_score(triggered, ka_id)
        blocklisted = ka_id in justified_ids
        flagged = score >= threshold or blocklisted
        attributed = tuple(attribute(triggered, ka_id, k)) if score >= threshold else ()
        reports[ka_id] = RiskReport(
            ka=view.ka,
            score=score,
            flagged=flagged,
            attributed_variables=attributed,
            triggered=relevant,
            blocklist_justified=blocklisted,
        )
    return reports


def event_score(reports: dict[str, RiskReport]) -> Decimal:
    """Overall event risk, defined as the max over per-area scores."""
    return max((r.score for r in reports.values()), default=Decimal(0))


# --- persistence shape for audit-stable assessments -------------------------


def report_to_dict(report: RiskReport) -> dict:
    return {
        "ka": report.ka.id,
        "score": str(report.score),
        "flagged": report.flagged,
        "blocklist_justified": report.blocklist_justified,
        "attributed_variables": [[n, str(c)] for n, c in report.attributed_variables],
        "triggered": [
            {
                "rule_id": t.rule.rule_id,
                "description": t.rule.description,
                "expression": t.rule.expression,
                "severity": str(t.rule.severity),
                "variables": list(t.rule.variables),
                "kas": sorted(t.kas),
            }
            for t in report.triggered
        ],
    }


def report_from_dict(d: dict, ka: KnowledgeAreaId) -> RiskReport:
    triggered = tuple(
        TriggeredRule(
            Rule(
                t["rule_id"],
                t["description"],
                t["expression"],
                Decimal(t["severity"]),
                tuple(t["variables"]),
                None,
            ),
            frozenset(t["kas"]),
        )
        for t in d["triggered"]
    )
    return RiskReport(
        ka=ka,
        score=Decimal(d["score"]),
        flagged=d["flagged"],
        attributed_variables=tuple((n, Decimal(c)) for n, c in d["attributed_variables"]),
        triggered=triggered,
        blocklist_justified=d["blocklist_justified"],
    )
