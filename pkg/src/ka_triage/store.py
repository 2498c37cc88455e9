"""Persistence for transactions, persons, alerts, decisions, and the blocklist.

In-memory by default; an optional JSON snapshot file gives a single-file
embedded mode. All mutations go through one lock, so readers see consistent
snapshots and per-alert writes are serialized.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .model import (
    Alert,
    AlertContext,
    AlertStatus,
    Decision,
    KnowledgeAreaId,
    Person,
    Transaction,
    alert_from_dict,
    alert_to_dict,
    format_timestamp,
    parse_timestamp,
    person_from_dict,
    person_to_dict,
    transaction_from_dict,
    transaction_to_dict,
    validate_transaction,
)


class NotFoundError(KeyError):
    pass


class ConflictError(ValueError):
    pass


@dataclass(frozen=True)
class BlockEntry:
    subject_kind: str  # "user" | "device"
    subject_id: str
    justification_text: str
    justified_kas: tuple[KnowledgeAreaId, ...]
    added_at: datetime


@dataclass(frozen=True)
class IngestResult:
    ingested: int
    skipped: int
    rejections: tuple[tuple[str, list[str]], ...] = ()


class TriageStore:
    def __init__(self, path: str | Path | None = None):
        self._lock = threading.RLock()
        self._transactions: dict[str, Transaction] = {}
        self._txns_by_person: dict[str, list[str]] = {}
        self._persons: dict[str, Person] = {}
        self._alerts: dict[str, Alert] = {}
        self._alerts_by_person: dict[str, list[str]] = {}
        self._blocklist: dict[tuple[str, str], BlockEntry] = {}
        # alert_id -> serialized per-KA assessment, persisted so flags are
        # stable for audit even if the rule file changes later
        self._assessments: dict[str, dict] = {}
        self._path = Path(path) if path else None
        if self._path and self._path.exists():
            self._load()

    # -- persons -------------------------------------------------------------

    def put_person(self, person: Person) -> None:
        with self._lock:
            self._persons[person.person_id] = person

    def get_person(self, person_id: str) -> Person:
        try:
            return self._persons[person_id]
        except KeyError:
            raise NotFoundError(f"unknown person {person_id!r}") from None

    def persons(self) -> list[Person]:
        with self._lock:
            return list(self._persons.values())

    # -- transactions --------------------------------------------------------

    def ingest(self, events: list[Transaction]) -> IngestResult:
        """Idempotent batch insert keyed on transaction_id.

        Invalid records are rejected individually; the batch continues.
        """
        ingested = skipped = 0
        rejections: list[tuple[str, list[str]]] = []
        with self._lock:
            for t in events:
                violations = validate_transaction(t)
                if violations:
                    rejections.append((t.transaction_id, violations))
                    continue
                if t.transaction_id in self._transactions:
                    skipped += 1
                    continue
                self._transactions[t.transaction_id] = t
                self._txns_by_person.setdefault(t.person_id, []).append(t.transaction_id)
                ingested += 1
        return IngestResult(ingested, skipped, tuple(rejections))

    def get_transaction(self, transaction_id: str) -> Transaction:
        try:
            return self._transactions[transaction_id]
        except KeyError:
            raise NotFoundError(f"unknown transaction {transaction_id!r}") from None

    def transactions_for(self, person_id: str) -> list[Transaction]:
        with self._lock:
            rows = [self._transactions[i] for i in self._txns_by_person.get(person_id, [])]
        rows.sort(key=lambda t: (t.timestamp, t.transaction_id))
        return rows

    def transaction_count(self) -> int:
        return len(self._transactions)

    # -- alerts --------------------------------------------------------------

    def put_alert(self, alert: Alert) -> None:
        with self._lock:
            if alert.alert_id in self._alerts:
                raise ConflictError(f"alert {alert.alert_id!r} already exists")
            self._alerts[alert.alert_id] = alert
            txn = self._transactions.get(alert.transaction_id)
            if txn is not None:
                self._alerts_by_person.setdefault(txn.person_id, []).append(alert.alert_id)

    def get_alert(self, alert_id: str) -> Alert:
        try:
            return self._alerts[alert_id]
        except KeyError:
            raise NotFoundError(f"unknown alert {alert_id!r}") from None

    def list_alerts(self, status: Optional[AlertStatus] = None) -> list[Alert]:
        with self._lock:
            alerts = list(self._alerts.values())
        if status is not None:
            alerts = [a for a in alerts if a.status == status]
        alerts.sort(key=lambda a: (a.created_at, a.alert_id), reverse=True)
        return alerts

    def load_context(self, alert_id: str) -> AlertContext:
        with self._lock:
            alert = self.get_alert(alert_id)
            current = self.get_transaction(alert.transaction_id)
            person = self.get_person(current.person_id)
            history = [
                t
                for t in (
                    self._transactions[i]
                    for i in self._txns_by_person.get(person.person_id, [])
                )
                if t.transaction_id != current.transaction_id
                and t.timestamp < current.timestamp
            ]
            past_alerts = [
                a
                for a in (
                    self._alerts[i]
                    for i in self._alerts_by_person.get(person.person_id, [])
                )
                if a.alert_id != alert_id and a.created_at <= alert.created_at
            ]
        history.sort(key=lambda t: (t.timestamp, t.transaction_id))
        past_alerts.sort(key=lambda a: (a.created_at, a.alert_id))
        return AlertContext(
            alert=alert,
            current=current,
            person=person,
            history=tuple(history),
            past_alerts=tuple(past_alerts),
        )

    def alerts_for(self, person_id: str) -> list[Alert]:
        with self._lock:
            alerts = [self._alerts[i] for i in self._alerts_by_person.get(person_id, [])]
        alerts.sort(key=lambda a: (a.created_at, a.alert_id))
        return alerts

    def record_decision(self, alert_id: str, decision: Decision, now: datetime | None = None) -> Alert:
        """Close an open alert; a fraud decision marks the transaction."""
        with self._lock:
            alert = self.get_alert(alert_id)
            if alert.status == AlertStatus.DECIDED:
                raise ConflictError(f"alert {alert_id!r} already decided")
            decided_at = now or datetime.now(timezone.utc)
            updated = replace(
                alert, status=AlertStatus.DECIDED, decision=decision, decided_at=decided_at
            )
            self._alerts[alert_id] = updated
            if decision == Decision.FRAUD:
                txn = self._transactions.get(alert.transaction_id)
                if txn is not None:
                    self._transactions[txn.transaction_id] = txn.with_confirmed_fraud()
            return updated

    # -- blocklist -----------------------------------------------------------

    def blocklist_add(self, entry: BlockEntry) -> None:
        if not entry.justified_kas:
            raise ValueError("justified_kas must be non-empty")
        if entry.subject_kind not in ("user", "device"):
            raise ValueError(f"bad subject_kind {entry.subject_kind!r}")
        key = (entry.subject_kind, entry.subject_id)
        with self._lock:
            if key in self._blocklist:
                raise ConflictError(f"blocklist entry for {key} already exists")
            self._blocklist[key] = entry

    def blocklist_check(self, person_id: str, device_id: Optional[str] = None) -> Optional[BlockEntry]:
        """User match wins over device match when both exist."""
        with self._lock:
            user_hit = self._blocklist.get(("user", person_id))
            if user_hit is not None:
                return user_hit
            if device_id is not None:
                return self._blocklist.get(("device", device_id))
        return None

    # -- persisted assessments -----------------------------------------------

    def put_assessment(self, alert_id: str, assessment: dict) -> None:
        with self._lock:
            self._assessments[alert_id] = assessment

    def get_assessment(self, alert_id: str) -> dict:
        try:
            return self._assessments[alert_id]
        except KeyError:
            raise NotFoundError(f"no assessment for alert {alert_id!r}") from None

    # -- snapshot persistence ------------------------------------------------

    def save(self, path: str | Path | None = None) -> None:
        target = Path(path) if path else self._path
        if target is None:
            raise ValueError("no snapshot path configured")
        with self._lock:
            doc = {
                "transactions": [transaction_to_dict(t) for t in self._transactions.values()],
                "persons": [person_to_dict(p) for p in self._persons.values()],
                "alerts": [alert_to_dict(a) for a in self._alerts.values()],
                "blocklist": [
                    {
                        "subject_kind": e.subject_kind,
                        "subject_id": e.subject_id,
                        "justification_text": e.justification_text,
                        "justified_kas": [
                            {"id": k.id, "label": k.label, "icon_key": k.icon_key}
                            for k in e.justified_kas
                        ],
                        "added_at": format_timestamp(e.added_at),
                    }
                    for e in self._blocklist.values()
                ],
                "assessments": self._assessments,
            }
        tmp = target.with_suffix(target.suffix + ".tmp")
        tmp.write_text(json.dumps(doc, indent=1))
        tmp.replace(target)

    def _load(self) -> None:
        doc = json.loads(self._path.read_text())
        for d in doc.get("persons", []):
            p = person_from_dict(d)
            self._persons[p.person_id] = p
        for d in doc.get("transactions", []):
            t = transaction_from_dict(d)
            self._transactions[t.transaction_id] = t
            self._txns_by_person.setdefault(t.person_id, []).append(t.transaction_id)
        for d in doc.get("alerts", []):
            a = alert_from_dict(d)
            self._alerts[a.alert_id] = a
            txn = self._transactions.get(a.transaction_id)
            if txn is not None:
                self._alerts_by_person.setdefault(txn.person_id, []).append(a.alert_id)
        for d in doc.get("blocklist", []):
            entry = BlockEntry(
                subject_kind=d["subject_kind"],
                subject_id=d["subject_id"],
                justification_text=d["justification_text"],
                justified_kas=tuple(
                    KnowledgeAreaId(k["id"], k["label"], k["icon_key"])
                    for k in d["justified_kas"]
                ),
                added_at=parse_timestamp(d["added_at"]),
            )
            self._blocklist[(entry.subject_kind, entry.subject_id)] = entry
        self._assessments = dict(doc.get("assessments", {}))
