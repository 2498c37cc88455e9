import json

from click.testing import CliRunner

from ka_triage.cli import main
from ka_triage.store import TriageStore


def _gen(runner, tmp_path, seed=11, persons=25, days=90, fraud_rate="0.02"):
    data_dir = tmp_path / "data"
    result = runner.invoke(
        main,
        [
            "gen",
            "--seed", str(seed),
            "--persons", str(persons),
            "--days", str(days),
            "--fraud-rate", fraud_rate,
            "--out", str(data_dir),
        ],
    )
    assert result.exit_code == 0, result.output
    return data_dir


def _ingest(runner, data_dir, tmp_path):
    store_path = tmp_path / "store.json"
    result = runner.invoke(main, ["ingest", str(data_dir), "--store", str(store_path)])
    assert result.exit_code == 0, result.output
    return store_path, result


def test_gen_writes_all_three_files(tmp_path):
    runner = CliRunner()
    data_dir = _gen(runner, tmp_path)
    for name in ("persons.jsonl", "transactions.jsonl", "labels.jsonl"):
        assert (data_dir / name).exists()
    labels = [json.loads(l) for l in (data_dir / "labels.jsonl").read_text().splitlines()]
    assert labels, "nonzero fraud rate should produce labels"


def test_gen_rejects_bad_rate(tmp_path):
    runner = CliRunner()
    result = runner.invoke(main, ["gen", "--fraud-rate", "2.0", "--out", str(tmp_path / "d")])
    assert result.exit_code != 0


def test_gen_ingest_round_trip(tmp_path):
    runner = CliRunner()
    data_dir = _gen(runner, tmp_path)
    store_path, result = _ingest(runner, data_dir, tmp_path)
    assert "rejected 0" in result.output
    n_rows = len((data_dir / "transactions.jsonl").read_text().splitlines())
    assert f"ingested {n_rows}" in result.output

    store = TriageStore(store_path)
    assert store.transaction_count() == n_rows
    assert store.list_alerts(), "labeled fraud should create alerts"


def test_labeled_fraud_is_alerted(tmp_path):
    runner = CliRunner()
    data_dir = _gen(runner, tmp_path)
    store_path, _ = _ingest(runner, data_dir, tmp_path)
    store = TriageStore(store_path)
    alerted_txns = {a.transaction_id for a in store.list_alerts()}
    labels = [json.loads(l) for l in (data_dir / "labels.jsonl").read_text().splitlines()]
    missing = [l for l in labels if l["transaction_id"] not in alerted_txns]
    assert missing == []


def test_triage_output_marks_flagged_area(tmp_path):
    runner = CliRunner()
    data_dir = _gen(runner, tmp_path)
    store_path, _ = _ingest(runner, data_dir, tmp_path)
    store = TriageStore(store_path)
    labels = [json.loads(l) for l in (data_dir / "labels.jsonl").read_text().splitlines()]
    scenario_b = next(l for l in labels if l["scenario"] == "b")
    alert = next(a for a in store.list_alerts() if a.transaction_id == scenario_b["transaction_id"])

    result = runner.invoke(main, ["triage", alert.alert_id, "--store", str(store_path)])
    assert result.exit_code == 0, result.output
    location_line = next(l for l in result.output.splitlines() if "location" in l and "score=" in l)
    assert location_line.strip().startswith("[!]")
    assert "== Location ==" in result.output


def test_triage_output_is_stable(tmp_path):
    runner = CliRunner()
    data_dir = _gen(runner, tmp_path)
    store_path, _ = _ingest(runner, data_dir, tmp_path)
    store = TriageStore(store_path)
    alert_id = store.list_alerts()[0].alert_id
    a = runner.invoke(main, ["triage", alert_id, "--store", str(store_path)])
    b = runner.invoke(main, ["triage", alert_id, "--store", str(store_path)])
    assert a.output == b.output


def test_triage_unknown_alert_exits_2(tmp_path):
    runner = CliRunner()
    data_dir = _gen(runner, tmp_path, persons=5, days=20, fraud_rate="0")
    store_path, _ = _ingest(runner, data_dir, tmp_path)
    result = runner.invoke(main, ["triage", "al-nope", "--store", str(store_path)])
    assert result.exit_code == 2


def test_summarize_command(tmp_path):
    runner = CliRunner()
    data_dir = _gen(runner, tmp_path)
    store_path, _ = _ingest(runner, data_dir, tmp_path)
    store = TriageStore(store_path)
    alert_id = store.list_alerts()[0].alert_id
    result = runner.invoke(main, ["summarize", alert_id, "activity", "--store", str(store_path)])
    assert result.exit_code == 0, result.output
    assert "current amount" in result.output


def test_summarize_unknown_ka_exits_2(tmp_path):
    runner = CliRunner()
    data_dir = _gen(runner, tmp_path, persons=5, days=20, fraud_rate="0")
    store_path, _ = _ingest(runner, data_dir, tmp_path)
    store = TriageStore(store_path)
    # with fraud rate 0 there may still be alerts; build one only if present
    alerts = store.list_alerts()
    alert_id = alerts[0].alert_id if alerts else "al-nope"
    result = runner.invoke(main, ["summarize", alert_id, "weather", "--store", str(store_path)])
    assert result.exit_code == 2
