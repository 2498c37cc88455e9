import type { TransactionRow } from "./types";

const COLUMNS: [keyof TransactionRow & string, string][] = [
  ["timestamp", "Timestamp"],
  ["transaction_id", "Id"],
  ["direction", "Direction"],
  ["amount", "Amount"],
  ["currency", "Currency"],
  ["channel", "Channel"],
  ["counterpart_name", "Counterpart"],
  ["country", "Country"],
  ["city", "City"],
];

/**
 * Data table below the panels, newest transactions first, with the
 * fraud / legitimate decision buttons. Buttons are disabled while a
 * decision is in flight so it can be posted at most once.
 */
export class TablePanel {
  readonly element: HTMLElement;
  private onDecide: (decision: "fraud" | "legitimate") => void = () => {};
  private buttons: HTMLButtonElement[] = [];

  constructor(doc: Document) {
    this.element = doc.createElement("section");
    this.element.className = "table-panel";
  }

  setDecideHandler(handler: (decision: "fraud" | "legitimate") => void): void {
    this.onDecide = handler;
  }

  render(rows: TransactionRow[]): void {
    const doc = this.element.ownerDocument;
    this.element.textContent = "";
    this.buttons = [];

    const table = doc.createElement("table");
    const head = doc.createElement("tr");
    for (const [, label] of COLUMNS) {
      const th = doc.createElement("th");
      th.textContent = label;
      head.appendChild(th);
    }
    table.appendChild(head);

    const sorted = [...rows].sort((a, b) => b.timestamp.localeCompare(a.timestamp));
    for (const row of sorted) {
      const tr = doc.createElement("tr");
      tr.dataset.txn = row.transaction_id;
      for (const [key] of COLUMNS) {
        const td = doc.createElement("td");
        td.textContent = String(row[key] ?? "");
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    this.element.appendChild(table);

    const actions = doc.createElement("div");
    actions.className = "decision-actions";
    for (const decision of ["fraud", "legitimate"] as const) {
      const button = doc.createElement("button");
      button.className = `decide-${decision}`;
      button.textContent = decision === "fraud" ? "Mark fraud" : "Mark legitimate";
      button.addEventListener("click", () => {
        this.setBusy(true);
        this.onDecide(decision);
      });
      this.buttons.push(button);
      actions.appendChild(button);
    }
    this.element.appendChild(actions);
  }

  setBusy(busy: boolean): void {
    for (const button of this.buttons) {
      button.disabled = busy;
    }
  }

  showBanner(message: string): void {
    const doc = this.element.ownerDocument;
    const existing = this.element.querySelector(".banner");
    if (existing) existing.remove();
    const banner = doc.createElement("p");
    banner.className = "banner";
    banner.textContent = message;
    this.element.prepend(banner);
  }
}
