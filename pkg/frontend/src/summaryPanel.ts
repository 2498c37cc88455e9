import { renderHighlighted } from "./highlights";
import type { SummaryDoc } from "./types";

/**
 * Text summary (panel B). Highlight spans come from the server as UTF-8
 * byte offsets and are rendered verbatim; sentinel summaries are shown as
 * plain literal text.
 */
export class SummaryPanel {
  readonly element: HTMLElement;

  constructor(doc: Document) {
    this.element = doc.createElement("section");
    this.element.className = "summary-panel";
    this.showPlaceholder("Select a knowledge area");
  }

  showPlaceholder(message: string): void {
    this.element.textContent = "";
    const note = this.element.ownerDocument.createElement("p");
    note.className = "placeholder";
    note.textContent = message;
    this.element.appendChild(note);
  }

  showError(message: string, retry: () => void): void {
    this.element.textContent = "";
    const doc = this.element.ownerDocument;
    const note = doc.createElement("p");
    note.className = "fetch-error";
    note.textContent = message;
    const button = doc.createElement("button");
    button.className = "retry";
    button.textContent = "Retry";
    button.addEventListener("click", retry);
    note.appendChild(button);
    this.element.appendChild(note);
  }

  render(summary: SummaryDoc): void {
    const doc = this.element.ownerDocument;
    this.element.textContent = "";

    const body = doc.createElement("p");
    body.className = `summary-text generator-${summary.generator}`;
    if (summary.generator === "unavailable") {
      body.textContent = summary.text;
    } else {
      body.appendChild(renderHighlighted(doc, summary.text, summary.highlights));
    }
    this.element.appendChild(body);
  }
}
