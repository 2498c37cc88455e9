"""Command-line entry point: dataset generation, ingestion, serving, and
offline triage output suitable for golden-file tests."""

from __future__ import annotations

import sys
from decimal import Decimal
from pathlib import Path

import click
import yaml

from . import intelligence
from .datagen import Dataset, GenConfig, GenConfigError, generate, write_dataset
from .model import person_from_dict, transaction_from_dict
from .pipeline import TriageConfig, TriagePipeline
from .store import NotFoundError, TriageStore
from .summarize import HttpLlmClient


def _load_jsonl(path: Path) -> list[dict]:
    import json

    records = []
    with path.open() as f:
        for line in f:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def _build_pipeline(store_path: str, config: TriageConfig) -> TriagePipeline:
    store = TriageStore(store_path)
    client = HttpLlmClient.from_env()
    llm = client.complete if client else None
    return TriagePipeline(store, config=config, llm_client=llm)


def _config_from_file(path: str | None) -> dict:
    if not path:
        return {}
    return yaml.safe_load(Path(path).read_text()) or {}


@click.group()
def main():
    """Fraud-alert triage toolkit."""


@main.command()
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--persons", "n_persons", type=int, default=20, show_default=True)
@click.option("--days", type=int, default=120, show_default=True)
@click.option("--fraud-rate", type=str, default="0.02", show_default=True)
@click.option("--out", type=click.Path(), required=True)
def gen(seed: int, n_persons: int, days: int, fraud_rate: str, out: str):
    """Generate a synthetic dataset (persons, transactions, labels)."""
    try:
        cfg = GenConfig(seed=seed, n_persons=n_persons, days=days, fraud_rate=Decimal(fraud_rate))
        ds = generate(cfg)
    except (GenConfigError, ValueError) as e:
        raise click.UsageError(str(e))
    paths = write_dataset(ds, out)
    click.echo(
        f"wrote {len(ds.persons)} persons, {len(ds.transactions)} transactions, "
        f"{len(ds.labels)} labeled fraud rows to {out}"
    )
    for name, p in paths.items():
        click.echo(f"  {name}: {p}")


@main.command()
@click.argument("data_dir", type=click.Path(exists=True))
@click.option("--store", "store_path", type=click.Path(), required=True)
@click.option("--rules", "rules_path", type=click.Path(exists=True), default=None)
def ingest(data_dir: str, store_path: str, rules_path: str | None):
    """Ingest persons.jsonl and transactions.jsonl from DATA_DIR, creating
    alerts for flagged events, and save the store snapshot."""
    data = Path(data_dir)
    config = TriageConfig(rules_path=rules_path)
    pipeline = _build_pipeline(store_path, config)
    persons_file = data / "persons.jsonl"
    if persons_file.exists():
        for rec in _load_jsonl(persons_file):
            pipeline.store.put_person(person_from_dict(rec))
    txn_file = data / "transactions.jsonl"
    if not txn_file.exists():
        raise click.UsageError(f"no transactions.jsonl in {data_dir}")
    events = [transaction_from_dict(rec) for rec in _load_jsonl(txn_file)]
    outcome = pipeline.ingest_events(events)
    pipeline.store.save(store_path)
    click.echo(
        f"ingested {outcome.ingested}, skipped {outcome.skipped}, "
        f"rejected {len(outcome.rejections)}, alerts created {len(outcome.created_alerts)}"
    )
    if outcome.rejections:
        for txn_id, reasons in outcome.rejections:
            click.echo(f"  rejected {txn_id}: {'; '.join(reasons)}", err=True)


@main.command()
@click.option("--store", "store_path", type=click.Path(exists=True), required=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8470, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def serve(store_path: str, host: str, port: int, config_path: str | None):
    """Run the triage HTTP service."""
    import uvicorn

    from .service import create_app

    raw = _config_from_file(config_path)
    config = TriageConfig(
        threshold=Decimal(str(raw.get("threshold", "0.5"))),
        top_k=int(raw.get("top_k", 3)),
        window_days=int(raw.get("window_days", 90)),
        summary_mode=raw.get("summary_mode", "template_only"),
        page_size=int(raw.get("page_size", 50)),
        rules_path=raw.get("rules_path"),
    )
    pipeline = _build_pipeline(store_path, config)
    app = create_app(pipeline, api_token=raw.get("api_token"))
    uvicorn.run(app, host=raw.get("listen_host", host), port=int(raw.get("listen_port", port)))


def render_triage(pipeline: TriagePipeline, alert_id: str) -> str:
    """Stable plain-text overview plus per-area summaries."""
    overview = pipeline.overview(alert_id)
    reports = pipeline.reports(alert_id)
    person = overview["person"]
    lines = [
        f"Alert {overview['alert_id']}  status={overview['status']}",
        f"Person {person['person_id']}  {person['name']}  ({person['age']}, {person['country']})",
        "Areas:",
    ]
    for area in overview["areas"]:
        mark = "!" if area["risky"] else " "
        score = reports[area["id"]].score if area["id"] in reports else Decimal(0)
        lines.append(f"  [{mark}] {area['id']:<16} score={score}")
    for area in overview["areas"]:
        doc = pipeline.summary(alert_id, area["id"], mode="template_only")
        lines.append("")
        lines.append(f"== {area['label']} ==")
        lines.append(doc.text)
    return "\n".join(lines)


@main.command()
@click.argument("alert_id")
@click.option("--store", "store_path", type=click.Path(exists=True), required=True)
def triage(alert_id: str, store_path: str):
    """Print the alert overview and every area summary."""
    pipeline = _build_pipeline(store_path, TriageConfig())
    try:
        click.echo(render_triage(pipeline, alert_id))
    except NotFoundError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)


@main.command()
@click.argument("alert_id")
@click.argument("ka_id")
@click.option("--mode", default="template_only", show_default=True)
@click.option("--store", "store_path", type=click.Path(exists=True), required=True)
def summarize(alert_id: str, ka_id: str, mode: str, store_path: str):
    """Print one knowledge-area summary."""
    pipeline = _build_pipeline(store_path, TriageConfig())
    try:
        doc = pipeline.summary(alert_id, ka_id, mode)
    except NotFoundError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    except ValueError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    click.echo(doc.text)


if __name__ == "__main__":
    main()
