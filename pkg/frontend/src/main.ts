import { ApiClient } from "./api";
import { AnalystConsole } from "./app";

declare global {
  interface Window {
    TRIAGE_API_URL?: string;
    TRIAGE_API_TOKEN?: string;
  }
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const api = new ApiClient({
    baseUrl: window.TRIAGE_API_URL ?? "http://127.0.0.1:8470",
    token: window.TRIAGE_API_TOKEN,
  });
  const console_ = new AnalystConsole(root, api);
  const { alerts } = await api.listAlerts("open");
  if (alerts.length > 0) {
    await console_.loadAlert(alerts[0].alert_id);
  }
}

void boot();
