import { describe, expect, it } from "vitest";

import { ChartsPanel } from "../src/chartsPanel";
import { makeChart } from "./stub";

describe("charts panel", () => {
  it("renders title, bars, and the server subtitle", () => {
    const panel = new ChartsPanel(document);
    panel.render([makeChart()]);
    const figure = panel.element.querySelector(".chart")!;
    expect(figure.querySelector("h3")!.textContent).toBe("Transactions per country");
    expect(figure.querySelector(".subtitle")!.textContent).toBe(
      "count 2, mean 2.00, max 3.00, min 1.00",
    );
    expect(figure.querySelectorAll(".point").length).toBe(2);
  });

  it("marks current_gray targets with a gray band", () => {
    const panel = new ChartsPanel(document);
    panel.render([makeChart()]);
    const gray = panel.element.querySelector<HTMLElement>(".point.band-gray")!;
    expect(gray.dataset.category).toBe("FR");
  });

  it("marks fraud_red targets in red", () => {
    const panel = new ChartsPanel(document);
    panel.render([makeChart()]);
    const red = panel.element.querySelector<HTMLElement>(".point.mark-red")!;
    expect(red.dataset.category).toBe("PT");
  });

  it("renders every spec it is given", () => {
    const panel = new ChartsPanel(document);
    panel.render([
      makeChart({ chart_id: "activity.amount_over_time", chart_type: "area" }),
      makeChart({ chart_id: "activity.amount_histogram", chart_type: "histogram" }),
    ]);
    const ids = [...panel.element.querySelectorAll<HTMLElement>(".chart")].map(
      (n) => n.dataset.chartId,
    );
    expect(ids).toEqual(["activity.amount_over_time", "activity.amount_histogram"]);
  });

  it("falls back to a placeholder for unknown chart types", () => {
    const panel = new ChartsPanel(document);
    panel.render([makeChart({ chart_id: "x.bubble", chart_type: "bubble" })]);
    const placeholder = panel.element.querySelector(".chart-placeholder")!;
    expect(placeholder.textContent).toContain("x.bubble");
  });

  it("shows a notice when there are no specs", () => {
    const panel = new ChartsPanel(document);
    panel.render([]);
    expect(panel.element.querySelector(".no-data")).not.toBeNull();
  });

  it("renders a no_data spec as an empty chart", () => {
    const panel = new ChartsPanel(document);
    panel.render([makeChart({ chart_id: "card.no_data", chart_type: "no_data", series: [] })]);
    expect(panel.element.querySelector(".chart-no_data .no-data")).not.toBeNull();
  });
});
