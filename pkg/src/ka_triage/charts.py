"""Graphics engine: declarative chart specifications per knowledge area.

Specs are renderer-agnostic and versioned; the console draws them. Only
four familiar chart types are emitted: bar, histogram, stacked_bar, area.
The alerted transaction is annotated current_gray and confirmed-fraud rows
fraud_red.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Optional

from .features import KnowledgeAreaView
from .model import AlertContext, Direction, Transaction, format_timestamp

CHART_SCHEMA_VERSION = 1

MAX_CHARTS_PER_KA = 3
MIN_HISTOGRAM_BINS = 4
TOP_COUNTERPARTS = 10

TWO = Decimal("0.01")


@dataclass(frozen=True)
class SubtitleStats:
    count: int
    mean: Optional[Decimal] = None
    max: Optional[Decimal] = None
    min: Optional[Decimal] = None

    def render(self) -> str:
        if self.count == 0:
            return "count 0"
        return f"count {self.count}, mean {self.mean}, max {self.max}, min {self.min}"


@dataclass(frozen=True)
class Axis:
    label: str
    unit: Optional[str] = None


@dataclass(frozen=True)
class Annotation:
    kind: str  # "current_gray" | "fraud_red"
    target: str  # category, month key, or timestamp of the annotated point


@dataclass(frozen=True)
class Series:
    label: str
    points: tuple[tuple[str, Decimal], ...]


@dataclass(frozen=True)
class ChartSpec:
    chart_id: str
    ka: str
    chart_type: str  # bar | histogram | stacked_bar | area | no_data
    title: str
    subtitle: str
    x_axis: Axis
    y_axis: Axis
    series: tuple[Series, ...]
    annotations: tuple[Annotation, ...] = ()


def subtitle_stats(values: list[Decimal]) -> SubtitleStats:
    """Count/mean/max/min over fixed-point values; mean rounds half-even."""
    if not values:
        return SubtitleStats(count=0)
    mean = (sum(values) / Decimal(len(values))).quantize(TWO, rounding=ROUND_HALF_EVEN)
    return SubtitleStats(
        count=len(values),
        mean=mean,
        max=max(values).quantize(TWO),
        min=min(values).quantize(TWO),
    )


def _month_key(t: Transaction) -> str:
    return t.timestamp.strftime("%Y-%m")


def _fraud_annotations(rows: list[Transaction], target_of) -> list[Annotation]:
    return [Annotation("fraud_red", target_of(t)) for t in rows if t.confirmed_fraud]


def _histogram(values: list[Decimal]) -> tuple[tuple[str, Decimal], ...]:
    """Sturges binning with a floor of MIN_HISTOGRAM_BINS bins."""
    if not values:
        return ()
    lo, hi = min(values), max(values)
    bins = max(MIN_HISTOGRAM_BINS, math.ceil(math.log2(len(values))) + 1 if len(values) > 1 else MIN_HISTOGRAM_BINS)
    if lo == hi:
        return ((f"[{lo}, {hi}]", Decimal(len(values))),)
    width = (hi - lo) / Decimal(bins)
    counts = [0] * bins
    for v in values:
        idx = min(int((v - lo) / width), bins - 1)
        counts[idx] += 1
    points = []
    for i, c in enumerate(counts):
        left = (lo + width * i).quantize(TWO)
        right = (lo + width * (i + 1)).quantize(TWO)
        points.append((f"[{left}, {right})", Decimal(c)))
    return tuple(points)


def _bucket_of(value: Decimal, points: tuple[tuple[str, Decimal], ...], lo: Decimal, hi: Decimal) -> str:
    if lo == hi or len(points) == 1:
        return points[0][0]
    width = (hi - lo) / Decimal(len(points))
    idx = min(int((value - lo) / width), len(points) - 1)
    return points[idx][0]


def _no_data(ka: str) -> ChartSpec:
    return ChartSpec(
        chart_id=f"{ka}.no_data",
        ka=ka,
        chart_type="no_data",
        title="No data",
        subtitle="count 0",
        x_axis=Axis(""),
        y_axis=Axis(""),
        series=(),
    )


def charts_for(view: KnowledgeAreaView, ctx: AlertContext) -> list[ChartSpec]:
    """Fixed per-area chart mapping; pure and deterministic."""
    ka = view.ka.id
    rows = list(view.rows)
    cur = ctx.current
    if not rows:
        return [_no_data(ka)]

    specs: list[ChartSpec] = []
    currency = cur.currency

    if ka == "alerted_person":
        # timeline of previously alerted / confirmed rows plus the current one
        amounts = [t.amount for t in rows]
        points = tuple((format_timestamp(t.timestamp), t.amount) for t in rows)
        ann = [Annotation("current_gray", format_timestamp(cur.timestamp))]
        ann += _fraud_annotations(rows, lambda t: format_timestamp(t.timestamp))
        specs.append(
            ChartSpec(
                chart_id=f"{ka}.alert_timeline",
                ka=ka,
                chart_type="bar",
                title="Past alerted activity",
                subtitle=subtitle_stats(amounts).render(),
                x_axis=Axis("date"),
                y_axis=Axis("amount", currency),
                series=(Series("alerted amount", points),),
                annotations=tuple(ann),
            )
        )
    elif ka == "location":
        counts: dict[str, int] = {}
        for t in rows:
            counts[t.country] = counts.get(t.country, 0) + 1
        points = tuple((c, Decimal(n)) for c, n in sorted(counts.items()))
        ann = [Annotation("current_gray", cur.country)]
        ann += _fraud_annotations(rows, lambda t: t.country)
        specs.append(
            ChartSpec(
                chart_id=f"{ka}.country_counts",
                ka=ka,
                chart_type="bar",
                title="Transactions per country",
                subtitle=subtitle_stats([Decimal(n) for n in counts.values()]).render(),
                x_axis=Axis("country"),
                y_axis=Axis("transactions"),
                series=(Series("transactions", points),),
                annotations=tuple(ann),
            )
        )
    elif ka == "flow_balance":
        months = sorted({_month_key(t) for t in rows})
        in_points, out_points, net_points = [], [], []
        for m in months:
            total_in = sum((t.amount for t in rows if _month_key(t) == m and t.direction == Direction.INCOMING), Decimal(0))
            total_out = sum((t.amount for t in rows if _month_key(t) == m and t.direction == Direction.OUTGOING), Decimal(0))
            in_points.append((m, total_in.quantize(TWO)))
            out_points.append((m, total_out.quantize(TWO)))
            net_points.append((m, (total_in - total_out).quantize(TWO)))
        amounts = [t.amount for t in rows]
        ann = [Annotation("current_gray", _month_key(cur))]
        ann += _fraud_annotations(rows, _month_key)
        specs.append(
            ChartSpec(
                chart_id=f"{ka}.monthly_flow",
                ka=ka,
                chart_type="stacked_bar",
                title="Incoming vs outgoing per month",
                subtitle=subtitle_stats(amounts).render(),
                x_axis=Axis("month"),
                y_axis=Axis("amount", currency),
                series=(Series("incoming", tuple(in_points)), Series("outgoing", tuple(out_points))),
                annotations=tuple(ann),
            )
        )
        specs.append(
            ChartSpec(
                chart_id=f"{ka}.net_flow",
                ka=ka,
                chart_type="area",
                title="Net flow per month",
                subtitle=subtitle_stats([p[1] for p in net_points]).render(),
                x_axis=Axis("month"),
                y_axis=Axis("net amount", currency),
                series=(Series("net flow", tuple(net_points)),),
                annotations=(Annotation("current_gray", _month_key(cur)),),
            )
        )
    elif ka == "card":
        counts = {}
        for t in rows:
            mode = t.card_entry_mode.value if t.card_entry_mode else "unknown"
            counts[mode] = counts.get(mode, 0) + 1
        points = tuple((m, Decimal(n)) for m, n in sorted(counts.items()))
        cur_mode = cur.card_entry_mode.value if cur.card_entry_mode else "unknown"
        ann = []
        if cur in rows:
            ann.append(Annotation("current_gray", cur_mode))
        ann += _fraud_annotations(rows, lambda t: t.card_entry_mode.value if t.card_entry_mode else "unknown")
        specs.append(
            ChartSpec(
                chart_id=f"{ka}.entry_modes",
                ka=ka,
                chart_type="histogram",
                title="Card entry modes",
                subtitle=subtitle_stats([Decimal(n) for n in counts.values()]).render(),
                x_axis=Axis("entry mode"),
                y_axis=Axis("transactions"),
                series=(Series("transactions", points),),
                annotations=tuple(ann),
            )
        )
    elif ka == "counterpart":
        counts = {}
        for t in rows:
            counts[t.counterpart_name] = counts.get(t.counterpart_name, 0) + 1
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        top = ranked[:TOP_COUNTERPARTS]
        other = sum(n for _, n in ranked[TOP_COUNTERPARTS:])
        points = [(name, Decimal(n)) for name, n in top]
        if other:
            points.append(("other", Decimal(other)))
        shown = {name for name, _ in top}
        ann = [Annotation("current_gray", cur.counterpart_name if cur.counterpart_name in shown else "other")]
        ann += _fraud_annotations(rows, lambda t: t.counterpart_name if t.counterpart_name in shown else "other")
        specs.append(
            ChartSpec(
                chart_id=f"{ka}.counterpart_counts",
                ka=ka,
                chart_type="bar",
                title="Transactions per counterpart",
                subtitle=subtitle_stats([Decimal(n) for n in counts.values()]).render(),
                x_axis=Axis("counterpart"),
                y_axis=Axis("transactions"),
                series=(Series("transactions", tuple(points)),),
                annotations=tuple(ann),
            )
        )
    elif ka == "activity":
        amounts = [t.amount for t in rows]
        time_points = tuple((format_timestamp(t.timestamp), t.amount) for t in rows)
        ann = [Annotation("current_gray", format_timestamp(cur.timestamp))]
        ann += _fraud_annotations(rows, lambda t: format_timestamp(t.timestamp))
        subtitle = subtitle_stats(amounts).render()
        specs.append(
            ChartSpec(
                chart_id=f"{ka}.amount_over_time",
                ka=ka,
                chart_type="area",
                title="Amount over time",
                subtitle=subtitle,
                x_axis=Axis("date"),
                y_axis=Axis("amount", currency),
                series=(Series("amount", time_points),),
                annotations=tuple(ann),
            )
        )
        hist = _histogram(amounts)
        lo, hi = min(amounts), max(amounts)
        hist_ann = [Annotation("current_gray", _bucket_of(cur.amount, hist, lo, hi))]
        for t in rows:
            if t.confirmed_fraud:
                hist_ann.append(Annotation("fraud_red", _bucket_of(t.amount, hist, lo, hi)))
        specs.append(
            ChartSpec(
                chart_id=f"{ka}.amount_histogram",
                ka=ka,
                chart_type="histogram",
                title="Amount distribution",
                subtitle=subtitle,
                x_axis=Axis("amount", currency),
                y_axis=Axis("transactions"),
                series=(Series("transactions", hist),),
                annotations=tuple(hist_ann),
            )
        )
    else:
        amounts = [t.amount for t in rows]
        points = tuple((format_timestamp(t.timestamp), t.amount) for t in rows)
        ann = [Annotation("current_gray", format_timestamp(cur.timestamp))]
        specs.append(
            ChartSpec(
                chart_id=f"{ka}.amount_over_time",
                ka=ka,
                chart_type="area",
                title="Amount over time",
                subtitle=subtitle_stats(amounts).render(),
                x_axis=Axis("date"),
                y_axis=Axis("amount", currency),
                series=(Series("amount", points),),
                annotations=tuple(ann),
            )
        )

    return specs[:MAX_CHARTS_PER_KA]


def chart_to_dict(spec: ChartSpec) -> dict:
    return {
        "schema_version": CHART_SCHEMA_VERSION,
        "chart_id": spec.chart_id,
        "ka": spec.ka,
        "chart_type": spec.chart_type,
        "title": spec.title,
        "subtitle": spec.subtitle,
        "x_axis": {"label": spec.x_axis.label, "unit": spec.x_axis.unit},
        "y_axis": {"label": spec.y_axis.label, "unit": spec.y_axis.unit},
        "series": [
            {"label": s.label, "points": [[c, str(v)] for c, v in s.points]} for s in spec.series
        ],
        "annotations": [{"kind": a.kind, "target": a.target} for a in spec.annotations],
    }
