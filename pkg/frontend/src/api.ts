import type {
  AlertListItem,
  ChartSpec,
  Overview,
  SummaryDoc,
  TransactionRow,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export interface ApiConfig {
  baseUrl: string;
  token?: string;
  fetchImpl?: typeof fetch;
}

export class ApiClient {
  private readonly fetchImpl: typeof fetch;

  constructor(private readonly config: ApiConfig) {
    this.fetchImpl = config.fetchImpl ?? fetch.bind(globalThis);
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const headers: Record<string, string> = { ...(init?.headers as Record<string, string>) };
    if (this.config.token) {
      headers["Authorization"] = `Bearer ${this.config.token}`;
    }
    const resp = await this.fetchImpl(`${this.config.baseUrl}${path}`, { ...init, headers });
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = await resp.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  listAlerts(status?: string): Promise<{ alerts: AlertListItem[]; next_cursor: string | null }> {
    const query = status ? `?status=${encodeURIComponent(status)}` : "";
    return this.request(`/alerts${query}`);
  }

  overview(alertId: string): Promise<Overview> {
    return this.request(`/alerts/${encodeURIComponent(alertId)}/overview`);
  }

  summary(alertId: string, kaId: string): Promise<SummaryDoc> {
    return this.request(
      `/alerts/${encodeURIComponent(alertId)}/ka/${encodeURIComponent(kaId)}/summary`,
    );
  }

  charts(alertId: string, kaId: string): Promise<{ charts: ChartSpec[] }> {
    return this.request(
      `/alerts/${encodeURIComponent(alertId)}/ka/${encodeURIComponent(kaId)}/charts`,
    );
  }

  rows(alertId: string, kaId: string): Promise<{ rows: TransactionRow[] }> {
    return this.request(
      `/alerts/${encodeURIComponent(alertId)}/ka/${encodeURIComponent(kaId)}/rows`,
    );
  }

  decide(alertId: string, decision: "fraud" | "legitimate"): Promise<{ alert: AlertListItem }> {
    return this.request(`/alerts/${encodeURIComponent(alertId)}/decision`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ decision }),
    });
  }
}
