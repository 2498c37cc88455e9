import type { Overview } from "./types";
import { kaVisualState } from "./types";

const ICON_FALLBACK = "generic";
const KNOWN_ICONS = new Set([
  "person", "globe", "scale", "card", "handshake", "pulse", "generic",
]);

/**
 * Knowledge Area Console (panel A): the alerted person centered with the
 * other areas on a ring around it. Risky areas carry a red ring class;
 * the element is created once and updated in place on selection changes.
 */
export class ConsolePanel {
  readonly element: HTMLElement;
  private onSelect: (kaId: string) => void = () => {};

  constructor(doc: Document) {
    this.element = doc.createElement("section");
    this.element.className = "console-panel";
  }

  setSelectHandler(handler: (kaId: string) => void): void {
    this.onSelect = handler;
  }

  render(overview: Overview, selectedKa: string | null): void {
    const doc = this.element.ownerDocument;
    this.element.textContent = "";

    const person = doc.createElement("header");
    person.className = "person";
    person.textContent = `${overview.person.name} (${overview.person.age}, ${overview.person.country})`;
    this.element.appendChild(person);

    const ring = doc.createElement("div");
    ring.className = "ka-ring";
    const central = overview.areas.filter((a) => a.id === overview.central_ka);
    const around = overview.areas.filter((a) => a.id !== overview.central_ka);

    for (const area of central) {
      ring.appendChild(this.icon(doc, area.id, area.label, area.icon_key, area.risky, selectedKa, true, 0, 0));
    }
    around.forEach((area, i) => {
      // radial layout: evenly spaced angles, radius in percent of the panel
      const angle = (2 * Math.PI * i) / around.length;
      const x = Math.round(40 * Math.cos(angle) * 100) / 100;
      const y = Math.round(40 * Math.sin(angle) * 100) / 100;
      ring.appendChild(this.icon(doc, area.id, area.label, area.icon_key, area.risky, selectedKa, false, x, y));
    });
    this.element.appendChild(ring);
  }

  private icon(
    doc: Document,
    kaId: string,
    label: string,
    iconKey: string,
    risky: boolean,
    selectedKa: string | null,
    central: boolean,
    x: number,
    y: number,
  ): HTMLElement {
    const state = kaVisualState(risky, selectedKa === kaId);
    const node = doc.createElement("button");
    node.className = `ka-icon state-${state}${risky ? " ring-red" : ""}${central ? " central" : ""}`;
    node.dataset.ka = kaId;
    node.dataset.icon = KNOWN_ICONS.has(iconKey) ? iconKey : ICON_FALLBACK;
    node.style.setProperty("--x", `${x}%`);
    node.style.setProperty("--y", `${y}%`);
    node.title = label;
    node.textContent = label;
    node.addEventListener("click", () => this.onSelect(kaId));
    return node;
  }
}
