"""HTTP service: ingestion, alert listing, overview, per-area summaries,
charts, raw rows, and decisions.

Read endpoints are side-effect free; assessments were persisted at alert
creation, so repeated reads never change flags.
"""

from __future__ import annotations

import json
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import intelligence
from .charts import chart_to_dict
from .model import AlertStatus, Decision, alert_to_dict, transaction_from_dict, transaction_to_dict
from .pipeline import SCHEMA_VERSION, TriagePipeline
from .store import ConflictError, NotFoundError
from .summarize import SummaryDoc


def summary_to_dict(doc: SummaryDoc) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "ka": doc.ka.id,
        "text": doc.text,
        "highlights": [[s, e, kind] for s, e, kind in doc.highlights],
        "verified": doc.verified,
        "generator": doc.generator,
    }


def _parse_events_body(raw: bytes) -> list[dict]:
    text = raw.decode("utf-8").strip()
    if not text:
        raise ValueError("empty body")
    if text.startswith("["):
        doc = json.loads(text)
        if not isinstance(doc, list):
            raise ValueError("expected a JSON array")
        return doc
    records = []
    for line in text.splitlines():
        line = line.strip()
        if line:
            records.append(json.loads(line))
    return records


def create_app(pipeline: TriagePipeline, api_token: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="ka-triage")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.middleware("http")
    async def check_token(request: Request, call_next):
        if api_token:
            header = request.headers.get("authorization", "")
            if header != f"Bearer {api_token}":
                return JSONResponse({"detail": "unauthorized"}, status_code=401)
        return await call_next(request)

    @app.post("/events")
    async def post_events(request: Request):
        raw = await request.body()
        try:
            records = _parse_events_body(raw)
        except (ValueError, json.JSONDecodeError) as e:
            raise HTTPException(status_code=400, detail=f"malformed body: {e}")

        events = []
        rejections = []
        for i, rec in enumerate(records):
            try:
                events.append(transaction_from_dict(rec))
            except Exception as e:
                rejections.append([rec.get("transaction_id", f"record[{i}]"), [str(e)]])
        outcome = pipeline.ingest_events(events)
        rejections += [[txn_id, reasons] for txn_id, reasons in outcome.rejections]
        body = {
            "schema_version": SCHEMA_VERSION,
            "ingested": outcome.ingested,
            "skipped": outcome.skipped,
            "rejections": rejections,
            "created_alerts": list(outcome.created_alerts),
        }
        if rejections:
            return JSONResponse(body, status_code=422)
        return body

    @app.get("/alerts")
    def list_alerts(
        status: Optional[str] = Query(default=None),
        cursor: Optional[str] = Query(default=None),
        limit: Optional[int] = Query(default=None, ge=1, le=500),
    ):
        status_filter = None
        if status is not None:
            try:
                status_filter = AlertStatus(status)
            except ValueError:
                raise HTTPException(status_code=400, detail=f"bad status {status!r}")
        page_size = limit or pipeline.config.page_size
        offset = 0
        if cursor:
            try:
                offset = int(cursor)
            except ValueError:
                raise HTTPException(status_code=400, detail="bad cursor")
        alerts = pipeline.store.list_alerts(status_filter)
        page = alerts[offset: offset + page_size]
        next_cursor = str(offset + page_size) if offset + page_size < len(alerts) else None
        return {
            "schema_version": SCHEMA_VERSION,
            "alerts": [alert_to_dict(a) for a in page],
            "next_cursor": next_cursor,
        }

    @app.get("/alerts/{alert_id}/overview")
    def overview(alert_id: str):
        try:
            return pipeline.overview(alert_id)
        except NotFoundError as e:
            raise HTTPException(status_code=404, detail=str(e))

    @app.get("/alerts/{alert_id}/ka/{ka_id}/summary")
    def summary(alert_id: str, ka_id: str, mode: Optional[str] = Query(default=None)):
        try:
            doc = pipeline.summary(alert_id, ka_id, mode)
        except NotFoundError as e:
            raise HTTPException(status_code=404, detail=str(e))
        except ValueError as e:
            raise HTTPException(status_code=400, detail=str(e))
        return summary_to_dict(doc)

    @app.get("/alerts/{alert_id}/ka/{ka_id}/charts")
    def charts(alert_id: str, ka_id: str):
        try:
            specs = pipeline.charts(alert_id, ka_id)
        except NotFoundError as e:
            raise HTTPException(status_code=404, detail=str(e))
        return {"schema_version": SCHEMA_VERSION, "charts": [chart_to_dict(s) for s in specs]}

    @app.get("/alerts/{alert_id}/ka/{ka_id}/rows")
    def rows(alert_id: str, ka_id: str):
        try:
            txns = pipeline.rows(alert_id, ka_id)
        except NotFoundError as e:
            raise HTTPException(status_code=404, detail=str(e))
        return {
            "schema_version": SCHEMA_VERSION,
            "rows": [transaction_to_dict(t) for t in txns],
        }

    @app.post("/alerts/{alert_id}/decision")
    async def decide(alert_id: str, request: Request):
        try:
            body = await request.json()
            decision = Decision(body["decision"])
        except Exception:
            raise HTTPException(status_code=400, detail="body must be {'decision': 'fraud'|'legitimate'}")
        try:
            updated = pipeline.store.record_decision(alert_id, decision)
        except NotFoundError as e:
            raise HTTPException(status_code=404, detail=str(e))
        except ConflictError as e:
            raise HTTPException(status_code=409, detail=str(e))
        return {"schema_version": SCHEMA_VERSION, "alert": alert_to_dict(updated)}

    @app.post("/rules/reload")
    def reload_rules():
        try:
            pipeline.rules = intelligence.load_rules(pipeline.config.rules_path)
        except intelligence.RuleConfigError as e:
            raise HTTPException(status_code=400, detail=str(e))
        return {"schema_version": SCHEMA_VERSION, "rule_count": len(pipeline.rules)}

    return app
