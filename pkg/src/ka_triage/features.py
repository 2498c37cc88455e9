"""Knowledge-area parser: segments an alert context into per-area fact
tables, feature vectors, and raw row subsets.

The feature catalog is fixed and machine-readable so the rule loader can
validate every feature reference at startup. All functions here are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, timedelta
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Optional, Union

from .model import (
    ACTIVITY,
    ALERTED_PERSON,
    CARD,
    CARD_CHANNELS,
    COUNTERPART,
    FLOW_BALANCE,
    LOCATION,
    AlertContext,
    Direction,
    KnowledgeAreaId,
    Transaction,
)

DEFAULT_WINDOW_DAYS = 90

TWO = Decimal("0.01")
FOUR = Decimal("0.0001")

FactValue = Union[Decimal, int, str, date, bool]


@dataclass(frozen=True)
class Fact:
    fact_id: str
    ka: KnowledgeAreaId
    name: str
    value: FactValue
    unit: Optional[str] = None
    comparative: Optional[tuple[Decimal, Decimal]] = None


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    ka: KnowledgeAreaId
    unit: Optional[str]
    windowed: bool
    is_count: bool = False


FEATURE_CATALOG: tuple[FeatureSpec, ...] = (
    FeatureSpec("age", ALERTED_PERSON, "years", False),
    FeatureSpec("account_age_days", ALERTED_PERSON, "days", False),
    FeatureSpec("past_alert_count", ALERTED_PERSON, None, False, is_count=True),
    FeatureSpec("past_confirmed_fraud_count", ALERTED_PERSON, None, False, is_count=True),
    FeatureSpec("is_new_country", LOCATION, None, False),
    FeatureSpec("is_new_city", LOCATION, None, False),
    FeatureSpec("distinct_countries_90d", LOCATION, None, True, is_count=True),
    FeatureSpec("current_country_txn_share", LOCATION, None, True),
    FeatureSpec("total_in_90d", FLOW_BALANCE, "currency", True),
    FeatureSpec("total_out_90d", FLOW_BALANCE, "currency", True),
    FeatureSpec("net_flow_90d", FLOW_BALANCE, "currency", True),
    FeatureSpec("in_out_ratio_90d", FLOW_BALANCE, None, True),
    FeatureSpec("distinct_counterparties_90d", FLOW_BALANCE, None, True, is_count=True),
    FeatureSpec("is_new_card", CARD, None, False),
    FeatureSpec("entry_mode_rarity", CARD, None, False),
    FeatureSpec("card_txn_count", CARD, None, False, is_count=True),
    FeatureSpec("is_new_counterpart", COUNTERPART, None, False),
    FeatureSpec("counterpart_txn_count", COUNTERPART, None, False, is_count=True),
    FeatureSpec("counterpart_country_matches_person", COUNTERPART, None, False),
    FeatureSpec("txn_count_90d", ACTIVITY, None, True, is_count=True),
    FeatureSpec("mean_amount_90d", ACTIVITY, "currency", True),
    FeatureSpec("max_amount_90d", ACTIVITY, "currency", True),
    FeatureSpec("amount_zscore", ACTIVITY, None, True),
    FeatureSpec("hours_since_last_txn", ACTIVITY, "hours", False),
)

FEATURE_KA: dict[str, str] = {spec.name: spec.ka.id for spec in FEATURE_CATALOG}


def feature_descriptor() -> list[dict]:
    """Machine-readable catalog (name, ka, unit, windowed) for validators."""
    return [
        {"name": s.name, "ka": s.ka.id, "unit": s.unit, "windowed": s.windowed}
        for s in FEATURE_CATALOG
    ]


@dataclass(frozen=True)
class FeatureVector:
    values: dict[str, Decimal]

    def __getitem__(self, name: str) -> Decimal:
        return self.values[name]

    def ka_of(self, name: str) -> str:
        return FEATURE_KA[name]

    def slice_for(self, ka_id: str) -> dict[str, Decimal]:
        return {n: v for n, v in self.values.items() if FEATURE_KA[n] == ka_id}


@dataclass(frozen=True)
class KnowledgeAreaView:
    ka: KnowledgeAreaId
    facts: tuple[Fact, ...]
    features: dict[str, Decimal]
    rows: tuple[Transaction, ...]


def _mean(values: list[Decimal]) -> Decimal:
    return (sum(values) / Decimal(len(values))).quantize(TWO, rounding=ROUND_HALF_EVEN)


def _window_rows(ctx: AlertContext, window_days: int) -> list[Transaction]:
    horizon = ctx.current.timestamp - timedelta(days=window_days)
    return [t for t in ctx.history if t.timestamp >= horizon]


def extract_features(ctx: AlertContext, window_days: int = DEFAULT_WINDOW_DAYS) -> FeatureVector:
    """Compute the fixed feature catalog for one alert context.

    Booleans are encoded 0/1; windows run backward from the alerted
    transaction's timestamp; ratios with zero denominators evaluate to 0.
    """
    cur = ctx.current
    person = ctx.person
    history = list(ctx.history)
    window = _window_rows(ctx, window_days)
    # flow totals cover the window plus the alerted transaction itself, so
    # balance rules see the event under review
    flow_rows = window + [cur]

    v: dict[str, Decimal] = {}

    # alerted person
    v["age"] = Decimal(person.age)
    v["account_age_days"] = Decimal((cur.timestamp.date() - person.account_opened).days)
    v["past_alert_count"] = Decimal(len(ctx.past_alerts))
    v["past_confirmed_fraud_count"] = Decimal(sum(1 for t in history if t.confirmed_fraud))

    # location; "new" signals are 0 when there is no history to compare with
    countries = {t.country for t in history}
    cities = {(t.country, t.city) for t in history}
    v["is_new_country"] = Decimal(1 if history and cur.country not in countries else 0)
    v["is_new_city"] = Decimal(1 if history and (cur.country, cur.city) not in cities else 0)
    v["distinct_countries_90d"] = Decimal(len({t.country for t in window}))
    v["current_country_txn_share"] = (
        (Decimal(sum(1 for t in window if t.country == cur.country)) / Decimal(len(window))).quantize(FOUR)
        if window
        else Decimal(0)
    )

    # flow balance
    total_in = sum((t.amount for t in flow_rows if t.direction == Direction.INCOMING), Decimal(0))
    total_out = sum((t.amount for t in flow_rows if t.direction == Direction.OUTGOING), Decimal(0))
    v["total_in_90d"] = total_in.quantize(TWO)
    v["total_out_90d"] = total_out.quantize(TWO)
    v["net_flow_90d"] = (total_in - total_out).quantize(TWO)
    v["in_out_ratio_90d"] = (total_in / total_out).quantize(FOUR) if total_out else Decimal(0)
    v["distinct_counterparties_90d"] = Decimal(len({t.counterpart_id for t in flow_rows}))

    # card
    card_history = [t for t in history if t.channel in CARD_CHANNELS]
    known_cards = {t.card_id for t in card_history}
    v["is_new_card"] = Decimal(1 if cur.card_id is not None and card_history and cur.card_id not in known_cards else 0)
    if cur.card_entry_mode is not None and card_history:
        same_mode = sum(1 for t in card_history if t.card_entry_mode == cur.card_entry_mode)
        v["entry_mode_rarity"] = (Decimal(same_mode) / Decimal(len(card_history))).quantize(FOUR)
    else:
        v["entry_mode_rarity"] = Decimal(0)
    v["card_txn_count"] = Decimal(
        sum(1 for t in card_history if t.card_id == cur.card_id) if cur.card_id else 0
    )

    # counterpart
    cp_count = sum(1 for t in history if t.counterpart_id == cur.counterpart_id)
    v["is_new_counterpart"] = Decimal(1 if history and cp_count == 0 else 0)
    v["counterpart_txn_count"] = Decimal(cp_count)
    v["counterpart_country_matches_person"] = Decimal(1 if cur.counterpart_country == person.country else 0)

    # activity; mean/std are over window history only, the z-score compares
    # the alerted amount against them
    amounts = [t.amount for t in window]
    v["txn_count_90d"] = Decimal(len(window))
    v["mean_amount_90d"] = _mean(amounts) if amounts else Decimal(0)
    v["max_amount_90d"] = max(amounts).quantize(TWO) if amounts else Decimal(0)
    if len(amounts) >= 2:
        mean = sum(amounts) / Decimal(len(amounts))
        var = sum((a - mean) ** 2 for a in amounts) / Decimal(len(amounts) - 1)
        std = var.sqrt()
        v["amount_zscore"] = ((cur.amount - mean) / std).quantize(FOUR) if std else Decimal(0)
    else:
        v["amount_zscore"] = Decimal(0)
    if history:
        delta = cur.timestamp - history[-1].timestamp
        v["hours_since_last_txn"] = (Decimal(int(delta.total_seconds())) / Decimal(3600)).quantize(TWO)
    else:
        v["hours_since_last_txn"] = Decimal(0)

    assert set(v) == set(FEATURE_KA), "feature catalog drift"
    return FeatureVector(values=v)


def _feature_facts(ka: KnowledgeAreaId, features: dict[str, Decimal]) -> list[Fact]:
    facts = []
    by_name = {s.name: s for s in FEATURE_CATALOG}
    for name, value in features.items():
        spec = by_name[name]
        display = name.replace("_90d", "").replace("_", " ")
        val: FactValue = value
        if name.startswith("is_") or name.endswith("_matches_person"):
            val = bool(value)
        elif spec.is_count or name in ("age", "account_age_days"):
            val = int(value)
        facts.append(Fact(f"{ka.id}.{name}", ka, display, val, unit=spec.unit))
    return facts


def _insufficient(ka: KnowledgeAreaId) -> Fact:
    return Fact(f"{ka.id}.insufficient_history", ka, "insufficient history", True)


def segment(
    ctx: AlertContext,
    registry: list[KnowledgeAreaId],
    window_days: int = DEFAULT_WINDOW_DAYS,
) -> dict[str, KnowledgeAreaView]:
    """Build one view per registered knowledge area, keyed by area id.

    Deterministic for equal inputs; the union of per-view features equals
    the extract_features output for the six stock areas.
    """
    cur = ctx.current
    person = ctx.person
    fv = extract_features(ctx, window_days)
    window = _window_rows(ctx, window_days)
    views: dict[str, KnowledgeAreaView] = {}

    alerted_txn_ids = {a.transaction_id for a in ctx.past_alerts}

    for ka in registry:
        features = fv.slice_for(ka.id)
        facts: list[Fact] = []
        rows: list[Transaction] = []

        if ka.id == ALERTED_PERSON.id:
            facts.append(Fact(f"{ka.id}.person_name", ka, "name", person.name))
            facts.append(Fact(f"{ka.id}.person_country", ka, "country", person.country))
            facts.append(Fact(f"{ka.id}.account_opened", ka, "account opened", person.account_opened))
            facts.extend(_feature_facts(ka, features))
            rows = [t for t in ctx.history if t.transaction_id in alerted_txn_ids or t.confirmed_fraud]
            rows.append(cur)
        elif ka.id == LOCATION.id:
            facts.append(Fact(f"{ka.id}.current_country", ka, "current country", cur.country))
            facts.append(Fact(f"{ka.id}.current_city", ka, "current city", cur.city))
            facts.extend(_feature_facts(ka, features))
            if not window:
                facts.append(_insufficient(ka))
            rows = window + [cur]
        elif ka.id == FLOW_BALANCE.id:
            facts.append(Fact(f"{ka.id}.currency", ka, "currency", cur.currency))
            facts.extend(_feature_facts(ka, features))
            if features.get("total_out_90d") == 0:
                facts.append(_insufficient(ka))
            rows = window + [cur]
        elif ka.id == CARD.id:
            if cur.card_entry_mode is not None:
                facts.append(Fact(f"{ka.id}.entry_mode", ka, "entry mode", cur.card_entry_mode.value))
            facts.extend(_feature_facts(ka, features))
            card_rows = [t for t in window if t.channel in CARD_CHANNELS]
            if cur.channel in CARD_CHANNELS:
                card_rows.append(cur)
            if not card_rows:
                facts.append(_insufficient(ka))
            rows = card_rows
        elif ka.id == COUNTERPART.id:
            facts.append(Fact(f"{ka.id}.counterpart_name", ka, "counterpart name", cur.counterpart_name))
            facts.append(Fact(f"{ka.id}.counterpart_country", ka, "counterpart country", cur.counterpart_country))
            facts.extend(_feature_facts(ka, features))
            rows = [t for t in ctx.history if t.counterpart_id == cur.counterpart_id]
            rows.append(cur)
        elif ka.id == ACTIVITY.id:
            mean = fv["mean_amount_90d"]
            facts.append(
                Fact(
                    f"{ka.id}.current_amount",
                    ka,
                    "current amount",
                    cur.amount.quantize(TWO),
                    unit=cur.currency,
                    comparative=(cur.amount.quantize(TWO), mean),
                )
            )
            facts.append(Fact(f"{ka.id}.current_date", ka, "current date", cur.timestamp.date()))
            facts.extend(_feature_facts(ka, features))
            if not window:
                facts.append(_insufficient(ka))
            rows = window + [cur]
        else:
            # custom areas carry no stock features; they still get a view
            facts.append(Fact(f"{ka.id}.row_count", ka, "row count", len(ctx.history) + 1))
            rows = list(ctx.history) + [cur]

        views[ka.id] = KnowledgeAreaView(
            ka=ka, facts=tuple(facts), features=features, rows=tuple(rows)
        )
    return views
