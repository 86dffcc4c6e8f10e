// Entry point: ?session=<id> selects the run, ?theme=<key> the timeline.

import { ApiClient } from "./api.js";
import { SessionBoard } from "./controller.js";
import { renderHistoryTimeline } from "./history.js";

async function start(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  const params = new URLSearchParams(window.location.search);
  const base = params.get("server") ?? "";
  const api = new ApiClient(base);
  const theme = params.get("theme");
  if (theme) {
    const envelope = await api.historyDiff(theme);
    if (envelope.ok) renderHistoryTimeline(root, envelope.data);
    return;
  }
  const sessionId = params.get("session");
  if (!sessionId) {
    root.textContent = "Pass ?session=<id> or ?theme=<key> in the URL.";
    return;
  }
  await new SessionBoard(api, root, sessionId).load();
}

void start();
