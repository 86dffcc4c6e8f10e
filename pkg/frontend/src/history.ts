// Longitudinal timeline: one row per signal delta, colored by class,
// with new and dead rows pinned to the top (priority evidence).

import type { HistoryDelta, HistoryDiffPayload } from "./types.js";

export function orderDeltas(deltas: HistoryDelta[]): HistoryDelta[] {
  const pinned = deltas.filter((d) => d.priority);
  const rest = deltas.filter((d) => !d.priority);
  const byKey = (a: HistoryDelta, b: HistoryDelta) =>
    a.signal_key.localeCompare(b.signal_key);
  return [...pinned.sort(byKey), ...rest.sort(byKey)];
}

export function deltaLabel(delta: HistoryDelta): string {
  const from = delta.prev_strength ?? "-";
  const to = delta.curr_strength ?? "-";
  const arrow =
    delta.classification === "strengthened"
      ? "↑"
      : delta.classification === "weakened"
        ? "↓"
        : "→";
  return `${delta.signal_key}: ${delta.classification} (${from} ${arrow} ${to})`;
}

export function renderHistoryTimeline(
  root: HTMLElement,
  diff: HistoryDiffPayload,
): void {
  root.replaceChildren();
  const heading = document.createElement("h2");
  heading.textContent = `Signal history: ${diff.theme_key}`;
  root.appendChild(heading);

  if (!diff.available) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.dataset.testid = "history-empty";
    empty.textContent =
      diff.sessions_found === 0
        ? "No recorded sessions on this theme yet."
        : "Only one recorded session on this theme; record a second run to see deltas.";
    root.appendChild(empty);
    return;
  }

  const meta = document.createElement("p");
  meta.textContent = `${diff.prev_session} → ${diff.curr_session}`;
  root.appendChild(meta);

  const list = document.createElement("ul");
  list.className = "history-timeline";
  for (const delta of orderDeltas(diff.deltas)) {
    const row = document.createElement("li");
    row.className = `delta delta-${delta.classification}`;
    row.dataset.signalKey = delta.signal_key;
    row.dataset.classification = delta.classification;
    if (delta.priority) {
      row.dataset.priority = "true";
      const badge = document.createElement("span");
      badge.className = "priority-badge";
      badge.textContent = "priority";
      row.appendChild(badge);
    }
    row.appendChild(document.createTextNode(deltaLabel(delta)));
    list.appendChild(row);
  }
  root.appendChild(list);
}
