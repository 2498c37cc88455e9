from __future__ import annotations

from datetime import date, datetime, timedelta, timezone
from decimal import Decimal

import pytest

from ka_triage.model import (
    Alert,
    AlertContext,
    CardEntryMode,
    Channel,
    Direction,
    Person,
    Transaction,
)

BASE_TS = datetime(2025, 5, 1, 12, 0, tzinfo=timezone.utc)


def make_txn(
    txn_id: str = "t1",
    days_before: float = 0.0,
    amount: str = "50.00",
    direction: Direction = Direction.OUTGOING,
    channel: Channel = Channel.TRANSFER,
    person_id: str = "p1",
    counterpart_id: str = "c1",
    counterpart_name: str = "Blue Harbor",
    counterpart_country: str = "PT",
    country: str = "PT",
    city: str = "Porto",
    card_id: str | None = None,
    card_entry_mode: CardEntryMode | None = None,
    device_id: str | None = "dev-1",
    confirmed_fraud: bool = False,
    ts: datetime | None = None,
) -> Transaction:
    if channel in (Channel.CARD_PRESENT, Channel.CARD_NOT_PRESENT) and card_id is None:
        card_id = "card-1"
        card_entry_mode = card_entry_mode or CardEntryMode.CHIP
    return Transaction(
        transaction_id=txn_id,
        timestamp=ts if ts is not None else BASE_TS - timedelta(days=days_before),
        amount=Decimal(amount),
        currency="EUR",
        direction=direction,
        channel=channel,
        person_id=person_id,
        counterpart_id=counterpart_id,
        counterpart_name=counterpart_name,
        counterpart_country=counterpart_country,
        country=country,
        city=city,
        card_id=card_id,
        card_entry_mode=card_entry_mode,
        device_id=device_id,
        confirmed_fraud=confirmed_fraud,
    )


def make_person(person_id: str = "p1", name: str = "Maria Silva", age: int = 43) -> Person:
    return Person(
        person_id=person_id,
        name=name,
        age=age,
        country="PT",
        account_opened=date(2019, 5, 1),
    )


def make_ctx(current: Transaction, history: list[Transaction] = (), person: Person | None = None,
             past_alerts: list[Alert] = ()) -> AlertContext:
    alert = Alert(
        alert_id=f"al-{current.transaction_id}",
        transaction_id=current.transaction_id,
        created_at=current.timestamp,
    )
    return AlertContext(
        alert=alert,
        current=current,
        person=person or make_person(current.person_id),
        history=tuple(sorted(history, key=lambda t: t.timestamp)),
        past_alerts=tuple(past_alerts),
    )


@pytest.fixture()
def simple_ctx() -> AlertContext:
    history = [
        make_txn("h1", days_before=30, amount="10.00", counterpart_id="c2", counterpart_name="Green Garden"),
        make_txn("h2", days_before=20, amount="20.00", direction=Direction.INCOMING,
                 counterpart_id="c3", counterpart_name="Urban Energy"),
        make_txn("h3", days_before=10, amount="30.00", channel=Channel.CARD_PRESENT),
    ]
    return make_ctx(make_txn("cur", amount="40.00"), history)
