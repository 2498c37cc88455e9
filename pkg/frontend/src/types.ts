// Payload shapes of the triage service HTTP API. Field names mirror the
// server responses exactly; the console never re-derives risk client-side.

export interface AreaState {
  id: string;
  label: string;
  icon_key: string;
  risky: boolean;
}

export interface Overview {
  schema_version: number;
  alert_id: string;
  status: "open" | "decided";
  person: { person_id: string; name: string; age: number; country: string };
  central_ka: string;
  areas: AreaState[];
}

export type HighlightSpan = [number, number, string]; // byte offsets into text

export interface SummaryDoc {
  schema_version: number;
  ka: string;
  text: string;
  highlights: HighlightSpan[];
  verified: boolean;
  generator: "llm" | "template" | "unavailable";
}

export interface Annotation {
  kind: "current_gray" | "fraud_red" | string;
  target: string;
}

export interface Series {
  label: string;
  points: [string, string][];
}

export interface ChartSpec {
  schema_version: number;
  chart_id: string;
  ka: string;
  chart_type: string;
  title: string;
  subtitle: string;
  x_axis: { label: string; unit: string | null };
  y_axis: { label: string; unit: string | null };
  series: Series[];
  annotations: Annotation[];
}

export interface TransactionRow {
  transaction_id: string;
  timestamp: string;
  amount: string;
  currency: string;
  direction: string;
  channel: string;
  counterpart_name: string;
  country: string;
  city: string;
  [key: string]: unknown;
}

export interface AlertListItem {
  alert_id: string;
  transaction_id: string;
  created_at: string;
  status: "open" | "decided";
  decision: string | null;
  decided_at: string | null;
}

export type KaVisualState = "normal" | "selected" | "risky" | "risky_selected";

export function kaVisualState(risky: boolean, selected: boolean): KaVisualState {
  if (risky && selected) return "risky_selected";
  if (risky) return "risky";
  if (selected) return "selected";
  return "normal";
}

export const SENTINEL_TEXT = "Summary not available";
