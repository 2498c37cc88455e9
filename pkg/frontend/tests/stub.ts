import { ApiClient } from "../src/api";
import type { AreaState, ChartSpec, Overview, SummaryDoc, TransactionRow } from "../src/types";

export type StubResponse = { status: number; body: unknown };
export type Handler = (url: string, init?: RequestInit) => StubResponse | Promise<StubResponse>;

/** fetch stand-in: first pattern that matches "<METHOD> <path>" wins. */
export function stubFetch(routes: [RegExp, Handler][]): typeof fetch {
  return (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = (init?.method ?? "GET").toUpperCase();
    const key = `${method} ${url}`;
    for (const [pattern, handler] of routes) {
      if (pattern.test(key)) {
        const { status, body } = await handler(url, init);
        return {
          ok: status >= 200 && status < 300,
          status,
          statusText: String(status),
          json: async () => body,
        } as Response;
      }
    }
    throw new Error(`no stub for ${key}`);
  }) as typeof fetch;
}

export function makeClient(routes: [RegExp, Handler][]): ApiClient {
  return new ApiClient({ baseUrl: "http://api.test", fetchImpl: stubFetch(routes) });
}

export function area(id: string, risky = false): AreaState {
  const labels: Record<string, string> = {
    alerted_person: "Alerted Person",
    location: "Location",
    flow_balance: "Flow Balance",
    card: "Card",
    counterpart: "Counterpart",
    activity: "Activity",
  };
  return { id, label: labels[id] ?? id, icon_key: "generic", risky };
}

export function makeOverview(riskyIds: string[] = [], extra: AreaState[] = []): Overview {
  const ids = ["alerted_person", "location", "flow_balance", "card", "counterpart", "activity"];
  return {
    schema_version: 1,
    alert_id: "al-1",
    status: "open",
    person: { person_id: "p1", name: "Maria Silva", age: 43, country: "PT" },
    central_ka: "alerted_person",
    areas: [...ids.map((id) => area(id, riskyIds.includes(id))), ...extra],
  };
}

export function makeSummary(over: Partial<SummaryDoc> = {}): SummaryDoc {
  return {
    schema_version: 1,
    ka: "location",
    text: "The current transaction took place in Lyon, FR.",
    highlights: [[44, 46, "risk"]],
    verified: true,
    generator: "template",
    ...over,
  };
}

export function makeChart(over: Partial<ChartSpec> = {}): ChartSpec {
  return {
    schema_version: 1,
    chart_id: "location.country_counts",
    ka: "location",
    chart_type: "bar",
    title: "Transactions per country",
    subtitle: "count 2, mean 2.00, max 3.00, min 1.00",
    x_axis: { label: "country", unit: null },
    y_axis: { label: "transactions", unit: null },
    series: [
      {
        label: "transactions",
        points: [
          ["FR", "1"],
          ["PT", "3"],
        ],
      },
    ],
    annotations: [
      { kind: "current_gray", target: "FR" },
      { kind: "fraud_red", target: "PT" },
    ],
    ...over,
  };
}

export function makeRow(id: string, timestamp: string): TransactionRow {
  return {
    transaction_id: id,
    timestamp,
    amount: "50.00",
    currency: "EUR",
    direction: "outgoing",
    channel: "transfer",
    counterpart_name: "Blue Harbor",
    country: "PT",
    city: "Porto",
  };
}
