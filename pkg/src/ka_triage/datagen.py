"""Seeded synthetic transaction generator with injected fraud scenarios.

Each person gets a behavioral profile (log-normal amount scale, Poisson
daily frequency, home country, recurring counterpart pool). Fraud is
injected as four scenarios, each labeled with its scenario id so tests can
use the labels as an oracle:

  a: amount spike well above the personal mean
  b: transaction from a country absent from the person's history
  c: burst of transactions with a fresh counterpart inside one hour
  d: balance drain, outgoing near the 90-day incoming total
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

from .model import (
    CardEntryMode,
    Channel,
    Direction,
    Person,
    Transaction,
    person_to_dict,
    transaction_to_dict,
)

TWO = Decimal("0.01")

SCENARIOS = ("a", "b", "c", "d")

# reference end of the generated timeline; fixed so output is a pure
# function of the config
EPOCH_END = datetime(2025, 6, 30, 0, 0, tzinfo=timezone.utc)

HOME_COUNTRIES = {"PT": "Porto", "ES": "Sevilla", "FR": "Lyon", "DE": "Bremen", "IT": "Torino"}
FOREIGN_COUNTRIES = {"BR": "Recife", "US": "Austin", "NG": "Lagos", "TH": "Phuket", "RO": "Cluj"}

FIRST_NAMES = [
    "Maria", "Joao", "Ana", "Pedro", "Ines", "Carlos", "Lucia", "Miguel", "Sofia", "Tiago",
    "Elena", "Marco", "Clara", "Hugo", "Nadia", "Paulo", "Irene", "Victor", "Alice", "Bruno",
]
LAST_NAMES = [
    "Silva", "Santos", "Ferreira", "Oliveira", "Costa", "Martins", "Rocha", "Almeida",
    "Moreau", "Keller", "Rossi", "Bianchi", "Navarro", "Iglesias", "Weber", "Fischer",
]
SHOP_WORDS_A = ["Blue", "Green", "Golden", "Silver", "Urban", "Coastal", "Northern", "Central"]
SHOP_WORDS_B = ["Harbor", "Garden", "Market", "Bistro", "Supply", "Energy", "Telecom", "Grocers"]


class GenConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GenConfig:
    seed: int = 42
    n_persons: int = 20
    days: int = 120
    fraud_rate: Decimal = Decimal("0.02")
    scenario_weights: dict = field(
        default_factory=lambda: {"a": 0.25, "b": 0.25, "c": 0.25, "d": 0.25}
    )

    def validate(self) -> None:
        if self.n_persons < 1:
            raise GenConfigError("n_persons must be >= 1")
        if self.days < 1:
            raise GenConfigError("days must be >= 1")
        if not (Decimal(0) <= Decimal(str(self.fraud_rate)) <= Decimal(1)):
            raise GenConfigError("fraud_rate must be in [0,1]")
        if Decimal(str(self.fraud_rate)) > 0:
            total = sum(self.scenario_weights.get(s, 0) for s in SCENARIOS)
            if abs(total - 1.0) > 1e-9:
                raise GenConfigError("scenario weights must sum to 1")


@dataclass(frozen=True)
class Dataset:
    persons: tuple[Person, ...]
    transactions: tuple[Transaction, ...]
    labels: tuple[tuple[str, str], ...]  # (transaction_id, scenario)


@dataclass
class _Profile:
    person: Person
    city: str
    amount_mu: float  # log-space location of outgoing amounts
    sigma: float
    daily_rate: float
    card_id: str
    device_id: str
    entry_mode: CardEntryMode
    employers: list[tuple[str, str]]  # (id, name); incoming sources
    shops: list[tuple[str, str]]


def _poisson(rng: random.Random, lam: float) -> int:
    # Knuth's method; fine for the small rates used here
    limit = math.exp(-lam)
    k, p = 0, 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return k
        k += 1


def _amount(rng: random.Random, mu: float, sigma: float) -> Decimal:
    value = math.exp(rng.gauss(mu, sigma))
    return max(Decimal("0.01"), Decimal(str(round(value, 2))))


def generate(cfg: GenConfig) -> Dataset:
    """Deterministic dataset for the configured seed."""
    cfg.validate()
    rng = random.Random(cfg.seed)
    start = EPOCH_END - timedelta(days=cfg.days)

    profiles: list[_Profile] = []
    for i in range(cfg.n_persons):
        country = rng.choice(sorted(HOME_COUNTRIES))
        name = f"{rng.choice(FIRST_NAMES)} {rng.choice(LAST_NAMES)}"
        person = Person(
            person_id=f"p{i:04d}",
            name=name,
            age=rng.randint(19, 79),
            country=country,
            account_opened=(start - timedelta(days=rng.randint(200, 4000))).date(),
        )
        n_shops = rng.randint(4, 8)
        shops = [
            (
                f"c{i:04d}s{j}",
                f"{rng.choice(SHOP_WORDS_A)} {rng.choice(SHOP_WORDS_B)}",
            )
            for j in range(n_shops)
        ]
        employers = [(f"c{i:04d}e0", f"{rng.choice(SHOP_WORDS_A)} {rng.choice(SHOP_WORDS_B)}")]
        profiles.append(
            _Profile(
                person=person,
                city=HOME_COUNTRIES[country],
                amount_mu=rng.uniform(3.0, 4.2),
                sigma=0.5,
                daily_rate=rng.uniform(0.5, 1.5),
                card_id=f"card-{i:04d}",
                device_id=f"dev-{i:04d}",
                entry_mode=rng.choice([CardEntryMode.CHIP, CardEntryMode.ONLINE]),
                employers=employers,
                shops=shops,
            )
        )

    seq = 0

    def next_id() -> str:
        nonlocal seq
        seq += 1
        return f"t{seq:07d}"

    transactions: list[Transaction] = []

    def benign_txn(p: _Profile, ts: datetime) -> Transaction:
        incoming = rng.random() < 0.35
        if incoming:
            cp_id, cp_name = p.employers[0]
            amount = _amount(rng, p.amount_mu + math.log(4.0), p.sigma)
            channel = Channel.TRANSFER
        else:
            cp_id, cp_name = rng.choice(p.shops)
            amount = _amount(rng, p.amount_mu, p.sigma)
            channel = rng.choices(
                [Channel.CARD_PRESENT, Channel.CARD_NOT_PRESENT, Channel.TRANSFER, Channel.CASH],
                weights=[0.45, 0.2, 0.25, 0.1],
            )[0]
        card = channel in (Channel.CARD_PRESENT, Channel.CARD_NOT_PRESENT)
        return Transaction(
            transaction_id=next_id(),
            timestamp=ts,
            amount=amount,
            currency="EUR",
            direction=Direction.INCOMING if incoming else Direction.OUTGOING,
            channel=channel,
            person_id=p.person.person_id,
            counterpart_id=cp_id,
            counterpart_name=cp_name,
            counterpart_country=p.person.country,
            country=p.person.country,
            city=p.city,
            card_id=p.card_id if card else None,
            card_entry_mode=p.entry_mode if card else None,
            device_id=p.device_id,
        )

    for p in profiles:
        for day in range(cfg.days):
            for _ in range(_poisson(rng, p.daily_rate)):
                ts = start + timedelta(days=day, seconds=rng.randint(6 * 3600, 22 * 3600))
                transactions.append(benign_txn(p, ts))

    labels: list[tuple[str, str]] = []
    fraud_rate = Decimal(str(cfg.fraud_rate))
    n_fraud = int((fraud_rate * len(transactions)).to_integral_value(rounding=ROUND_HALF_EVEN))
    scenario_names = list(SCENARIOS)
    weights = [float(cfg.scenario_weights.get(s, 0)) for s in scenario_names]

    # at most one injection per person, so scenarios cannot contaminate
    # each other's history
    eligible = list(profiles)
    rng.shuffle(eligible)
    for _ in range(min(n_fraud, len(eligible))):
        scenario = rng.choices(scenario_names, weights=weights)[0] if fraud_rate > 0 else "a"
        p = eligible.pop()
        # inject in the final third of the timeline so real history exists
        inject_day = rng.randint(max(1, (2 * cfg.days) // 3), cfg.days - 1)
        ts = start + timedelta(days=inject_day, seconds=rng.randint(6 * 3600, 22 * 3600))
        person_txns = [t for t in transactions if t.person_id == p.person.person_id and t.timestamp < ts]
        if len(person_txns) < 5:
            continue

        if scenario == "a":
            mean = sum(t.amount for t in person_txns) / len(person_txns)
            amount = (mean * Decimal(str(round(rng.uniform(6.0, 9.0), 2)))).quantize(TWO)
            cp_id, cp_name = rng.choice(p.shops)
            txn = Transaction(
                transaction_id=next_id(),
                timestamp=ts,
                amount=amount,
                currency="EUR",
                direction=Direction.OUTGOING,
                channel=Channel.CARD_NOT_PRESENT,
                person_id=p.person.person_id,
                counterpart_id=cp_id,
                counterpart_name=cp_name,
                counterpart_country=p.person.country,
                country=p.person.country,
                city=p.city,
                card_id=p.card_id,
                card_entry_mode=p.entry_mode,
                device_id=p.device_id,
            )
            transactions.append(txn)
            labels.append((txn.transaction_id, "a"))
        elif scenario == "b":
            country = rng.choice(sorted(FOREIGN_COUNTRIES))
            txn = Transaction(
                transaction_id=next_id(),
                timestamp=ts,
                amount=_amount(rng, p.amount_mu, p.sigma),
                currency="EUR",
                direction=Direction.OUTGOING,
                channel=Channel.CARD_PRESENT,
                person_id=p.person.person_id,
                counterpart_id=f"cx-{seq:07d}",
                counterpart_name=f"{rng.choice(SHOP_WORDS_A)} {rng.choice(SHOP_WORDS_B)}",
                counterpart_country=country,
                country=country,
                city=FOREIGN_COUNTRIES[country],
                card_id=p.card_id,
                card_entry_mode=p.entry_mode,
                device_id=p.device_id,
            )
            transactions.append(txn)
            labels.append((txn.transaction_id, "b"))
        elif scenario == "c":
            cp_id = f"cx-{seq:07d}"
            cp_name = f"{rng.choice(SHOP_WORDS_A)} {rng.choice(SHOP_WORDS_B)}"
            burst_ts = [ts, ts + timedelta(minutes=rng.randint(5, 25)), ts + timedelta(minutes=rng.randint(30, 55))]
            for idx, bts in enumerate(burst_ts):
                txn = Transaction(
                    transaction_id=next_id(),
                    timestamp=bts,
                    amount=_amount(rng, p.amount_mu, p.sigma),
                    currency="EUR",
                    direction=Direction.OUTGOING,
                    channel=Channel.TRANSFER,
                    person_id=p.person.person_id,
                    counterpart_id=cp_id,
                    counterpart_name=cp_name,
                    counterpart_country=p.person.country,
                    country=p.person.country,
                    city=p.city,
                    device_id=p.device_id,
                )
                transactions.append(txn)
                # the first burst transaction is setup; only the follow-ups
                # can see the burst in their own history
                if idx > 0:
                    labels.append((txn.transaction_id, "c"))
        else:  # scenario d
            horizon = ts - timedelta(days=90)
            total_in = sum(
                (t.amount for t in person_txns if t.direction == Direction.INCOMING and t.timestamp >= horizon),
                Decimal(0),
            )
            if total_in < Decimal("50"):
                continue
            amount = (total_in * Decimal("0.9")).quantize(TWO)
            txn = Transaction(
                transaction_id=next_id(),
                timestamp=ts,
                amount=amount,
                currency="EUR",
                direction=Direction.OUTGOING,
                channel=Channel.TRANSFER,
                person_id=p.person.person_id,
                counterpart_id=f"cx-{seq:07d}",
                counterpart_name=f"{rng.choice(SHOP_WORDS_A)} {rng.choice(SHOP_WORDS_B)}",
                counterpart_country=p.person.country,
                country=p.person.country,
                city=p.city,
                device_id=p.device_id,
            )
            transactions.append(txn)
            labels.append((txn.transaction_id, "d"))

    transactions.sort(key=lambda t: (t.timestamp, t.transaction_id))
    return Dataset(
        persons=tuple(pr.person for pr in profiles),
        transactions=tuple(transactions),
        labels=tuple(labels),
    )


def write_dataset(ds: Dataset, out_dir: str | Path) -> dict[str, Path]:
    """Write persons/transactions/labels as JSONL; byte-stable per config."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "persons": out / "persons.jsonl",
        "transactions": out / "transactions.jsonl",
        "labels": out / "labels.jsonl",
    }
    with paths["persons"].open("w") as f:
        for p in ds.persons:
            f.write(json.dumps(person_to_dict(p)) + "\n")
    with paths["transactions"].open("w") as f:
        for t in ds.transactions:
            f.write(json.dumps(transaction_to_dict(t)) + "\n")
    with paths["labels"].open("w") as f:
        for txn_id, scenario in ds.labels:
            f.write(json.dumps({"transaction_id": txn_id, "scenario": scenario}) + "\n")
    return paths
