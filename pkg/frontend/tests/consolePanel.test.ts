import { describe, expect, it } from "vitest";

import { ConsolePanel } from "../src/consolePanel";
import { kaVisualState } from "../src/types";
import { area, makeOverview } from "./stub";

function panel() {
  return new ConsolePanel(document);
}

describe("ka visual states", () => {
  it("covers all four states", () => {
    expect(kaVisualState(false, false)).toBe("normal");
    expect(kaVisualState(false, true)).toBe("selected");
    expect(kaVisualState(true, false)).toBe("risky");
    expect(kaVisualState(true, true)).toBe("risky_selected");
  });
});

describe("console panel", () => {
  it("renders each of the four states as a distinct class", () => {
    const p = panel();
    p.render(makeOverview(["location", "activity"]), "location");
    const stateOf = (ka: string) =>
      p.element.querySelector<HTMLElement>(`[data-ka="${ka}"]`)!.className;
    expect(stateOf("location")).toContain("state-risky_selected");
    expect(stateOf("activity")).toContain("state-risky");
    expect(stateOf("card")).toContain("state-normal");

    p.render(makeOverview(["location", "activity"]), "card");
    expect(stateOf("card")).toContain("state-selected");
  });

  it("centers the alerted person", () => {
    const p = panel();
    p.render(makeOverview(), null);
    const central = p.element.querySelector('[data-ka="alerted_person"]')!;
    expect(central.className).toContain("central");
  });

  it("shows no rings when nothing is risky", () => {
    const p = panel();
    p.render(makeOverview(), null);
    expect(p.element.querySelectorAll(".ka-icon").length).toBe(6);
    expect(p.element.querySelectorAll(".ring-red").length).toBe(0);
  });

  it("rings exactly the overview risky areas", () => {
    const p = panel();
    p.render(makeOverview(["location", "flow_balance"]), null);
    const ringed = [...p.element.querySelectorAll<HTMLElement>(".ring-red")].map(
      (node) => node.dataset.ka,
    );
    expect(ringed.sort()).toEqual(["flow_balance", "location"]);
  });

  it("lays out twelve areas without dropping any", () => {
    const extra = Array.from({ length: 6 }, (_, i) => area(`custom_${i}`));
    const p = panel();
    p.render(makeOverview([], extra), null);
    const icons = [...p.element.querySelectorAll<HTMLElement>(".ka-icon")];
    expect(icons.length).toBe(12);
    const positions = new Set(
      icons.map((n) => `${n.style.getPropertyValue("--x")}/${n.style.getPropertyValue("--y")}`),
    );
    expect(positions.size).toBe(12); // distinct slots, no overlap
  });

  it("notifies the selection handler", () => {
    const p = panel();
    const clicks: string[] = [];
    p.setSelectHandler((ka) => clicks.push(ka));
    p.render(makeOverview(), null);
    p.element.querySelector<HTMLElement>('[data-ka="activity"]')!.click();
    expect(clicks).toEqual(["activity"]);
  });
});
