"""Triage pipeline: ingestion with assessment at alert creation, plus the
read paths (overview, summaries, charts, rows) shared by the HTTP service
and the CLI.

Assessments are computed once when an alert is created and persisted, so
flags stay stable for audit even if the rule file changes afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Optional

from . import intelligence
from .charts import ChartSpec, charts_for
from .features import DEFAULT_WINDOW_DAYS, KnowledgeAreaView, segment
from .intelligence import RiskReport, Rule
from .model import (
    Alert,
    AlertContext,
    KnowledgeAreaId,
    Transaction,
    default_registry,
    validate_transaction,
)
from .store import NotFoundError, TriageStore
from .summarize import LlmCallable, SummaryDoc, summarize

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class TriageConfig:
    threshold: Decimal = intelligence.DEFAULT_THRESHOLD
    top_k: int = intelligence.DEFAULT_TOP_K
    window_days: int = DEFAULT_WINDOW_DAYS
    summary_mode: str = "template_only"
    page_size: int = 50
    rules_path: Optional[str] = None


@dataclass(frozen=True)
class IngestOutcome:
    ingested: int
    skipped: int
    rejections: tuple[tuple[str, list[str]], ...]
    created_alerts: tuple[str, ...]


class TriagePipeline:
    def __init__(
        self,
        store: TriageStore,
        rules: Optional[list[Rule]] = None,
        registry: Optional[list[KnowledgeAreaId]] = None,
        config: TriageConfig = TriageConfig(),
        llm_client: Optional[LlmCallable] = None,
    ):
        self.store = store
        self.config = config
        self.rules = rules if rules is not None else intelligence.load_rules(config.rules_path)
        self.registry = registry if registry is not None else default_registry()
        self.llm_client = llm_client

    # -- write path ----------------------------------------------------------

    def ingest_events(self, events: list[Transaction]) -> IngestOutcome:
        """Ingest a batch; each stored event is assessed and an alert is
        created whenever any knowledge area flags."""
        ingested = skipped = 0
        rejections: list[tuple[str, list[str]]] = []
        created: list[str] = []
        for txn in events:
            violations = validate_transaction(txn)
            try:
                self.store.get_person(txn.person_id)
            except NotFoundError:
                violations = violations + [f"unknown person {txn.person_id!r}"]
            if violations:
                rejections.append((txn.transaction_id, violations))
                continue
            result = self.store.ingest([txn])
            if result.skipped:
                skipped += 1
                continue
            ingested += 1
            alert = self._assess_new(txn)
            if alert is not None:
                created.append(alert.alert_id)
        return IngestOutcome(ingested, skipped, tuple(rejections), tuple(created))

    def _assess_new(self, txn: Transaction) -> Optional[Alert]:
        alert = Alert(
            alert_id=f"al-{txn.transaction_id}",
            transaction_id=txn.transaction_id,
            created_at=txn.timestamp,
        )
        past_alerts = self.store.alerts_for(txn.person_id)
        ctx = AlertContext(
            alert=alert,
            current=txn,
            person=self.store.get_person(txn.person_id),
            history=tuple(
                t
                for t in self.store.transactions_for(txn.person_id)
                if t.transaction_id != txn.transaction_id and t.timestamp < txn.timestamp
            ),
            past_alerts=tuple(past_alerts),
        )
        reports = self._assess(ctx)
        if not any(r.flagged for r in reports.values()):
            return None
        self.store.put_alert(alert)
        self.store.put_assessment(
            alert.alert_id,
            {ka_id: intelligence.report_to_dict(r) for ka_id, r in reports.items()},
        )
        return alert

    def _assess(self, ctx: AlertContext) -> dict[str, RiskReport]:
        views = segment(ctx, self.registry, self.config.window_days)
        block = self.store.blocklist_check(ctx.person.person_id, ctx.current.device_id)
        return intelligence.assess(
            ctx,
            views,
            self.rules,
            threshold=self.config.threshold,
            k=self.config.top_k,
            block=block,
        )

    # -- read path -----------------------------------------------------------

    def context(self, alert_id: str) -> AlertContext:
        return self.store.load_context(alert_id)

    def views(self, alert_id: str) -> tuple[AlertContext, dict[str, KnowledgeAreaView]]:
        ctx = self.store.load_context(alert_id)
        return ctx, segment(ctx, self.registry, self.config.window_days)

    def reports(self, alert_id: str) -> dict[str, RiskReport]:
        try:
            stored = self.store.get_assessment(alert_id)
        except NotFoundError:
            # alert created externally (replay): assess once and persist
            ctx = self.store.load_context(alert_id)
            reports = self._assess(ctx)
            self.store.put_assessment(
                alert_id, {k: intelligence.report_to_dict(r) for k, r in reports.items()}
            )
            return reports
        by_id = {ka.id: ka for ka in self.registry}
        return {
            ka_id: intelligence.report_from_dict(d, by_id[ka_id])
            for ka_id, d in stored.items()
            if ka_id in by_id
        }

    def overview(self, alert_id: str) -> dict:
        alert = self.store.get_alert(alert_id)
        ctx = self.store.load_context(alert_id)
        reports = self.reports(alert_id)
        return {
            "schema_version": SCHEMA_VERSION,
            "alert_id": alert.alert_id,
            "status": alert.status.value,
            "person": {
                "person_id": ctx.person.person_id,
                "name": ctx.person.name,
                "age": ctx.person.age,
                "country": ctx.person.country,
            },
            "central_ka": "alerted_person",
            "areas": [
                {
                    "id": ka.id,
                    "label": ka.label,
                    "icon_key": ka.icon_key,
                    "risky": reports[ka.id].flagged if ka.id in reports else False,
                }
                for ka in self.registry
            ],
        }

    def summary(self, alert_id: str, ka_id: str, mode: Optional[str] = None) -> SummaryDoc:
        ctx, views = self.views(alert_id)
        if ka_id not in views:
            raise NotFoundError(f"unknown knowledge area {ka_id!r}")
        reports = self.reports(alert_id)
        return summarize(
            views[ka_id],
            reports[ka_id],
            mode=mode or self.config.summary_mode,
            client=self.llm_client,
        )

    def charts(self, alert_id: str, ka_id: str) -> list[ChartSpec]:
        ctx, views = self.views(alert_id)
        if ka_id not in views:
            raise NotFoundError(f"unknown knowledge area {ka_id!r}")
        return charts_for(views[ka_id], ctx)

    def rows(self, alert_id: str, ka_id: str) -> list[Transaction]:
        ctx, views = self.views(alert_id)
        if ka_id not in views:
            raise NotFoundError(f"unknown knowledge area {ka_id!r}")
        return list(views[ka_id].rows)
