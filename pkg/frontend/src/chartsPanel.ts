import type { ChartSpec, Series } from "./types";

const KNOWN_TYPES = new Set(["bar", "histogram", "stacked_bar", "area", "no_data"]);

/**
 * Graphical representation (panel C): renders declarative chart specs as
 * simple scaled bars. Annotated categories get a gray band (current) or a
 * red mark (confirmed fraud); the server subtitle sits under each chart.
 */
export class ChartsPanel {
  readonly element: HTMLElement;

  constructor(doc: Document) {
    this.element = doc.createElement("section");
    this.element.className = "charts-panel";
  }

  showPlaceholder(message: string): void {
    this.element.textContent = "";
    const note = this.element.ownerDocument.createElement("p");
    note.className = "placeholder";
    note.textContent = message;
    this.element.appendChild(note);
  }

  render(specs: ChartSpec[]): void {
    const doc = this.element.ownerDocument;
    this.element.textContent = "";
    if (specs.length === 0) {
      const note = doc.createElement("p");
      note.className = "no-data";
      note.textContent = "No charts for this area";
      this.element.appendChild(note);
      return;
    }
    for (const spec of specs) {
      this.element.appendChild(this.chart(doc, spec));
    }
  }

  private chart(doc: Document, spec: ChartSpec): HTMLElement {
    const figure = doc.createElement("figure");
    figure.className = `chart chart-${spec.chart_type}`;
    figure.dataset.chartId = spec.chart_id;

    const title = doc.createElement("h3");
    title.textContent = spec.title;
    figure.appendChild(title);

    if (!KNOWN_TYPES.has(spec.chart_type)) {
      const placeholder = doc.createElement("p");
      placeholder.className = "chart-placeholder";
      placeholder.textContent = `Unsupported chart ${spec.chart_id}`;
      figure.appendChild(placeholder);
      return figure;
    }

    if (spec.chart_type === "no_data") {
      const note = doc.createElement("p");
      note.className = "no-data";
      note.textContent = "No data";
      figure.appendChild(note);
    } else {
      const grayTargets = new Set(
        spec.annotations.filter((a) => a.kind === "current_gray").map((a) => a.target),
      );
      const redTargets = new Set(
        spec.annotations.filter((a) => a.kind === "fraud_red").map((a) => a.target),
      );
      const peak = this.peak(spec.series);
      for (const series of spec.series) {
        figure.appendChild(this.seriesBlock(doc, series, peak, grayTargets, redTargets));
      }
    }

    const subtitle = doc.createElement("figcaption");
    subtitle.className = "subtitle";
    subtitle.textContent = spec.subtitle;
    figure.appendChild(subtitle);
    return figure;
  }

  private peak(series: Series[]): number {
    let peak = 0;
    for (const s of series) {
      for (const [, value] of s.points) {
        peak = Math.max(peak, Math.abs(parseFloat(value)));
      }
    }
    return peak || 1;
  }

  private seriesBlock(
    doc: Document,
    series: Series,
    peak: number,
    grayTargets: Set<string>,
    redTargets: Set<string>,
  ): HTMLElement {
    const block = doc.createElement("div");
    block.className = "series";
    block.dataset.series = series.label;
    for (const [category, value] of series.points) {
      const row = doc.createElement("div");
      const gray = grayTargets.has(category) ? " band-gray" : "";
      const red = redTargets.has(category) ? " mark-red" : "";
      row.className = `point${gray}${red}`;
      row.dataset.category = category;
      const bar = doc.createElement("span");
      bar.className = "bar";
      bar.style.width = `${Math.round((Math.abs(parseFloat(value)) / peak) * 100)}%`;
      bar.textContent = value;
      row.appendChild(doc.createTextNode(`${category} `));
      row.appendChild(bar);
      block.appendChild(row);
    }
    return block;
  }
}
