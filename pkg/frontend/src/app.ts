import { ApiClient, ApiError } from "./api";
import { ChartsPanel } from "./chartsPanel";
import { ConsolePanel } from "./consolePanel";
import { SummaryPanel } from "./summaryPanel";
import { TablePanel } from "./tablePanel";
import type { Overview } from "./types";

/**
 * Three-panel alert review: console (A), summary (B), charts (C), and the
 * data table below. Panels are constructed once and stay mounted; KA
 * selection and alert changes update them in place. Responses arriving
 * after a newer selection are discarded.
 */
export class AnalystConsole {
  readonly consolePanel: ConsolePanel;
  readonly summaryPanel: SummaryPanel;
  readonly chartsPanel: ChartsPanel;
  readonly tablePanel: TablePanel;

  private overview: Overview | null = null;
  private selectedKa: string | null = null;
  private selectSeq = 0;

  constructor(
    root: HTMLElement,
    private readonly api: ApiClient,
  ) {
    const doc = root.ownerDocument;
    this.consolePanel = new ConsolePanel(doc);
    this.summaryPanel = new SummaryPanel(doc);
    this.chartsPanel = new ChartsPanel(doc);
    this.tablePanel = new TablePanel(doc);
    root.appendChild(this.consolePanel.element);
    root.appendChild(this.summaryPanel.element);
    root.appendChild(this.chartsPanel.element);
    root.appendChild(this.tablePanel.element);
    this.consolePanel.setSelectHandler((kaId) => void this.selectKa(kaId));
    this.tablePanel.setDecideHandler((decision) => void this.decide(decision));
  }

  get currentAlertId(): string | null {
    return this.overview?.alert_id ?? null;
  }

  get currentKa(): string | null {
    return this.selectedKa;
  }

  async loadAlert(alertId: string): Promise<void> {
    this.selectSeq += 1;
    this.overview = await this.api.overview(alertId);
    this.selectedKa = null;
    this.consolePanel.render(this.overview, null);
    this.summaryPanel.showPlaceholder("Select a knowledge area");
    this.chartsPanel.showPlaceholder("Select a knowledge area");
    this.tablePanel.render([]);
  }

  async selectKa(kaId: string): Promise<void> {
    if (!this.overview) return;
    const alertId = this.overview.alert_id;
    this.selectedKa = kaId;
    this.consolePanel.render(this.overview, kaId);
    const seq = ++this.selectSeq;
    try {
      const [summary, charts, rows] = await Promise.all([
        this.api.summary(alertId, kaId),
        this.api.charts(alertId, kaId),
        this.api.rows(alertId, kaId),
      ]);
      if (seq !== this.selectSeq) return; // superseded selection
      this.summaryPanel.render(summary);
      this.chartsPanel.render(charts.charts);
      this.tablePanel.render(rows.rows);
    } catch (error) {
      if (seq !== this.selectSeq) return;
      const message = error instanceof ApiError ? error.message : "Fetch failed";
      this.summaryPanel.showError(message, () => void this.selectKa(kaId));
    }
  }

  async decide(decision: "fraud" | "legitimate"): Promise<void> {
    if (!this.overview) return;
    try {
      await this.api.decide(this.overview.alert_id, decision);
      await this.advanceToNextOpenAlert();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.tablePanel.showBanner("Alert already decided");
      } else {
        const message = error instanceof ApiError ? error.message : "Decision failed";
        this.tablePanel.showBanner(message);
      }
    } finally {
      this.tablePanel.setBusy(false);
    }
  }

  private async advanceToNextOpenAlert(): Promise<void> {
    const current = this.overview?.alert_id;
    const { alerts } = await this.api.listAlerts("open");
    const next = alerts.find((a) => a.alert_id !== current);
    if (next) {
      await this.loadAlert(next.alert_id);
    } else {
      this.tablePanel.showBanner("No open alerts left");
    }
  }
}
