"""Domain types, the knowledge-area registry, and record validation.

Everything here is an immutable value object; instances are safe to share
across threads and cache freely.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timezone
from decimal import Decimal
from enum import Enum
from typing import Optional

TWO_PLACES = Decimal("0.01")

MAX_KNOWLEDGE_AREAS = 12


class Direction(str, Enum):
    INCOMING = "incoming"
    OUTGOING = "outgoing"


class Channel(str, Enum):
    CARD_PRESENT = "card_present"
    CARD_NOT_PRESENT = "card_not_present"
    TRANSFER = "transfer"
    CASH = "cash"


CARD_CHANNELS = {Channel.CARD_PRESENT, Channel.CARD_NOT_PRESENT}


class CardEntryMode(str, Enum):
    CHIP = "chip"
    MAGSTRIPE = "magstripe"
    MANUAL = "manual"
    ONLINE = "online"


class AlertStatus(str, Enum):
    OPEN = "open"
    DECIDED = "decided"


class Decision(str, Enum):
    FRAUD = "fraud"
    LEGITIMATE = "legitimate"


_COUNTRY_RE = re.compile(r"^[A-Z]{2}$")
_CURRENCY_RE = re.compile(r"^[A-Z]{3}$")


@dataclass(frozen=True)
class Transaction:
    transaction_id: str
    timestamp: datetime
    amount: Decimal
    currency: str
    direction: Direction
    channel: Channel
    person_id: str
    counterpart_id: str
    counterpart_name: str
    counterpart_country: str
    country: str
    city: str
    card_id: Optional[str] = None
    card_entry_mode: Optional[CardEntryMode] = None
    device_id: Optional[str] = None
    confirmed_fraud: bool = False

    def with_confirmed_fraud(self) -> "Transaction":
        return replace(self, confirmed_fraud=True)


@dataclass(frozen=True)
class Person:
    person_id: str
    name: str
    age: int
    country: str
    account_opened: date


@dataclass(frozen=True)
class Alert:
    alert_id: str
    transaction_id: str
    created_at: datetime
    status: AlertStatus = AlertStatus.OPEN
    decision: Optional[Decision] = None
    decided_at: Optional[datetime] = None


@dataclass(frozen=True)
class KnowledgeAreaId:
    id: str
    label: str
    icon_key: str


# The six stock areas, in presentation order; the alerted person is the
# central element of the console.
ALERTED_PERSON = KnowledgeAreaId("alerted_person", "Alerted Person", "person")
LOCATION = KnowledgeAreaId("location", "Location", "globe")
FLOW_BALANCE = KnowledgeAreaId("flow_balance", "Flow Balance", "scales")
CARD = KnowledgeAreaId("card", "Card", "card")
COUNTERPART = KnowledgeAreaId("counterpart", "Counterpart", "handshake")
ACTIVITY = KnowledgeAreaId("activity", "Activity", "pulse")

_DEFAULT_AREAS = (ALERTED_PERSON, LOCATION, FLOW_BALANCE, CARD, COUNTERPART, ACTIVITY)


def default_registry() -> list[KnowledgeAreaId]:
    """The six stock knowledge areas, alerted_person first (central)."""
    return list(_DEFAULT_AREAS)


class RegistryError(ValueError):
    pass


@dataclass
class KnowledgeAreaRegistry:
    """Mutable registry: the six stock areas plus up to six custom ones."""

    areas: list[KnowledgeAreaId] = field(default_factory=default_registry)

    def register(self, area: KnowledgeAreaId) -> None:
        if any(a.id == area.id for a in self.areas):
            raise RegistryError(f"knowledge area {area.id!r} already registered")
        if len(self.areas) >= MAX_KNOWLEDGE_AREAS:
            raise RegistryError(f"registry is capped at {MAX_KNOWLEDGE_AREAS} areas")
        self.areas.append(area)

    def by_id(self, ka_id: str) -> KnowledgeAreaId:
        for a in self.areas:
            if a.id == ka_id:
                return a
        raise KeyError(ka_id)

    def __iter__(self):
        return iter(self.areas)

    def __len__(self) -> int:
        return len(self.areas)


@dataclass(frozen=True)
class AlertContext:
    alert: Alert
    current: Transaction
    person: Person
    history: tuple[Transaction, ...]
    past_alerts: tuple[Alert, ...]


def validate_transaction(t: Transaction) -> list[str]:
    """Return every violated invariant (empty list means the record is ok)."""
    violations: list[str] = []
    if not t.transaction_id:
        violations.append("transaction_id must be non-empty")
    if t.amount <= 0:
        violations.append("amount must be positive")
    if -t.amount.as_tuple().exponent > 2:
        violations.append("amount must have at most 2 fraction digits")
    if not _CURRENCY_RE.match(t.currency):
        violations.append("currency must be an ISO-4217 alpha-3 code")
    for name, code in (("country", t.country), ("counterpart_country", t.counterpart_country)):
        if not _COUNTRY_RE.match(code):
            violations.append(f"{name} must be an ISO-3166 alpha-2 code")
    if t.timestamp.tzinfo is None:
        violations.append("timestamp must be timezone-aware (UTC)")
    if t.channel in CARD_CHANNELS:
        if t.card_id is None:
            violations.append(f"card_id required for {t.channel.value}")
    else:
        if t.card_id is not None:
            violations.append(f"card_id forbidden for {t.channel.value}")
    if not t.person_id:
        violations.append("person_id must be non-empty")
    return violations


def validate_context(ctx: AlertContext) -> list[str]:
    violations = []
    for h in ctx.history:
        if h.person_id != ctx.current.person_id:
            violations.append(f"history txn {h.transaction_id} belongs to another person")
        if h.timestamp >= ctx.current.timestamp:
            violations.append(f"history txn {h.transaction_id} does not precede the current event")
    return violations


# --- serialization helpers (wire format: JSONL with RFC-3339 timestamps,
# --- amounts as 2-decimal strings) -----------------------------------------


def parse_timestamp(raw: str) -> datetime:
    ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def transaction_to_dict(t: Transaction) -> dict:
    d = {
        "transaction_id": t.transaction_id,
        "timestamp": format_timestamp(t.timestamp),
        "amount": str(t.amount.quantize(TWO_PLACES)),
        "currency": t.currency,
        "direction": t.direction.value,
        "channel": t.channel.value,
        "person_id": t.person_id,
        "counterpart_id": t.counterpart_id,
        "counterpart_name": t.counterpart_name,
        "counterpart_country": t.counterpart_country,
        "country": t.country,
        "city": t.city,
        "card_id": t.card_id,
        "card_entry_mode": t.card_entry_mode.value if t.card_entry_mode else None,
        "device_id": t.device_id,
        "confirmed_fraud": t.confirmed_fraud,
    }
    return d


def transaction_from_dict(d: dict) -> Transaction:
    return Transaction(
        transaction_id=str(d["transaction_id"]),
        timestamp=parse_timestamp(d["timestamp"]),
        amount=Decimal(str(d["amount"])),
        currency=d["currency"],
        direction=Direction(d["direction"]),
        channel=Channel(d["channel"]),
        person_id=str(d["person_id"]),
        counterpart_id=str(d["counterpart_id"]),
        counterpart_name=d["counterpart_name"],
        counterpart_country=d["counterpart_country"],
        country=d["country"],
        city=d["city"],
        card_id=d.get("card_id"),
        card_entry_mode=CardEntryMode(d["card_entry_mode"]) if d.get("card_entry_mode") else None,
        device_id=d.get("device_id"),
        confirmed_fraud=bool(d.get("confirmed_fraud", False)),
    )


def person_to_dict(p: Person) -> dict:
    return {
        "person_id": p.person_id,
        "name": p.name,
        "age": p.age,
        "country": p.country,
        "account_opened": p.account_opened.isoformat(),
    }


def person_from_dict(d: dict) -> Person:
    return Person(
        person_id=str(d["person_id"]),
        name=d["name"],
        age=int(d["age"]),
        country=d["country"],
        account_opened=date.fromisoformat(d["account_opened"]),
    )


def alert_to_dict(a: Alert) -> dict:
    return {
        "alert_id": a.alert_id,
        "transaction_id": a.transaction_id,
        "created_at": format_timestamp(a.created_at),
        "status": a.status.value,
        "decision": a.decision.value if a.decision else None,
        "decided_at": format_timestamp(a.decided_at) if a.decided_at else None,
    }


def alert_from_dict(d: dict) -> Alert:
    return Alert(
        alert_id=d["alert_id"],
        transaction_id=d["transaction_id"],
        created_at=parse_timestamp(d["created_at"]),
        status=AlertStatus(d["status"]),
        decision=Decision(d["decision"]) if d.get("decision") else None,
        decided_at=parse_timestamp(d["decided_at"]) if d.get("decided_at") else None,
    )
