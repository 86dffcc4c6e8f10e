import { beforeEach, describe, expect, it, vi } from "vitest";

import { renderBoard, renderNetworkRetry, renderNotFound } from "../src/board.js";
import { renderHistoryTimeline } from "../src/history.js";
import { buildViewModel } from "../src/viewmodel.js";
import type { HistoryDiffPayload } from "../src/types.js";
import {
  allPairs,
  fragments,
  gatesFor,
  ghostySession,
  precogSession,
  vision,
} from "./fixtures.js";

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app")!;
});

describe("collision matrix grid", () => {
  function collidingViewModel() {
    const frags = fragments(5);
    const pairs = allPairs(frags.map((f) => f.id));
    const session = ghostySession({
      status: "colliding",
      fragments: frags,
      collisions: pairs.slice(0, 4).map((pair) => ({
        pair,
        score: "boring" as const,
        rationale: "",
      })),
    });
    return buildViewModel(session, gatesFor(session));
  }

  it("renders an upper-triangular grid with three-state toggles on pending cells", () => {
    const submit = vi.fn();
    renderBoard(root, collidingViewModel(), submit);
    const pendingCells = root.querySelectorAll("td[data-pending='true']");
    expect(pendingCells).toHaveLength(6);
    expect(root.querySelector("[data-testid='pending-count']")!.textContent).toBe(
      "6 pending cell(s)",
    );
    const firstPending = pendingCells[0]!;
    expect(firstPending.querySelectorAll("button.toggle")).toHaveLength(3);
    // Lower triangle renders no cells at all.
    expect(root.querySelectorAll("td.matrix-lower").length).toBeGreaterThan(0);
    for (const cell of root.querySelectorAll("td.matrix-lower")) {
      expect(cell.textContent).toBe("");
    }
  });

  it("submits a collision when a toggle is clicked", () => {
    const submit = vi.fn();
    renderBoard(root, collidingViewModel(), submit);
    const cell = root.querySelector("td[data-pending='true']")!;
    const pair = cell.getAttribute("data-pair")!.split(":");
    cell.querySelector<HTMLButtonElement>("button[data-score='interesting']")!.click();
    expect(submit).toHaveBeenCalledWith("collision", {
      pair,
      score: "interesting",
      rationale: "",
    });
  });

  it("prompts for a rationale on electric", () => {
    const submit = vi.fn();
    vi.stubGlobal("prompt", () => "deep structures resonate");
    try {
      renderBoard(root, collidingViewModel(), submit);
      root
        .querySelector("td[data-pending='true']")!
        .querySelector<HTMLButtonElement>("button[data-score='electric']")!
        .click();
      expect(submit).toHaveBeenCalledWith(
        "collision",
        expect.objectContaining({ score: "electric", rationale: "deep structures resonate" }),
      );
    } finally {
      vi.unstubAllGlobals();
    }
  });
});

describe("inline validation errors", () => {
  it("renders the server error at its field path inside the open panel", () => {
    const frags = fragments(3);
    const session = ghostySession({ status: "crystallizing", fragments: frags });
    const vm = buildViewModel(session, gatesFor(session));
    renderBoard(root, vm, vi.fn(), {
      code: "rating_out_of_range",
      message: "rating novelty must be an integer in 1..5, got 6",
      field_path: "ratings.novelty",
    });
    const error = root.querySelector<HTMLElement>(".inline-error")!;
    expect(error.dataset.errorFor).toBe("ratings.novelty");
    expect(error.dataset.errorCode).toBe("rating_out_of_range");
    expect(error.closest("section")!.dataset.panel).toBe("visions");
  });
});

describe("vision trays", () => {
  it("places non-advancing visions in the parked tray", () => {
    const session = ghostySession({
      status: "crystallizing",
      fragments: fragments(3),
      visions: [vision("v1", [5, 2, 5, 5], false), vision("v2", [4, 4, 4, 4], true)],
    });
    renderBoard(root, buildViewModel(session, gatesFor(session)), vi.fn());
    const parked = root.querySelector("[data-tray='not-advancing']")!;
    expect(parked.querySelector("[data-vision-id='v1']")).not.toBeNull();
    const advancing = root.querySelector("[data-tray='advancing']")!;
    expect(advancing.querySelector("[data-vision-id='v2']")).not.toBeNull();
  });
});

describe("judgments and banners", () => {
  it("renders judgment rows with the server verdicts", () => {
    const session = precogSession({
      status: "timing",
      grid_evaluations: [
        {
          label: "Infrastructure Play",
          grid: {
            market_phase: "acceleration",
            competitive: "fast_follower",
            readiness: "ready",
            external_window: "open",
            annotation: "",
          },
          judgment: { overall: "go", polarity_sum: 4, escalated_contrarian_required: true },
        },
      ],
    });
    renderBoard(root, buildViewModel(session, gatesFor(session)), vi.fn());
    const row = root.querySelector<HTMLElement>("[data-label='Infrastructure Play']")!;
    expect(row.dataset.overall).toBe("go");
    expect(row.dataset.escalated).toBe("true");
    expect(row.textContent).toContain("go (sum=4)");
  });

  it("terminal abort renders as a banner", () => {
    const session = ghostySession({
      status: "aborted_no_electric",
      abort_reason: "no electric collisions found",
    });
    renderBoard(root, buildViewModel(session, gatesFor(session)), vi.fn());
    expect(
      root.querySelector("[data-banner='terminal']")!.textContent,
    ).toContain("no electric collisions found");
  });
});

describe("load failure states", () => {
  it("not-found banner", () => {
    renderNotFound(root, "ghost-session");
    expect(root.querySelector("[data-banner='not-found']")!.textContent).toContain(
      "ghost-session",
    );
  });

  it("network failure offers a retry affordance", () => {
    const retry = vi.fn();
    renderNetworkRetry(root, retry);
    root.querySelector<HTMLButtonElement>("button[data-action='retry']")!.click();
    expect(retry).toHaveBeenCalledOnce();
  });
});

describe("history timeline", () => {
  const diff: HistoryDiffPayload = {
    theme_key: "t",
    available: true,
    sessions_found: 2,
    prev_session: "p1",
    curr_session: "p2",
    deltas: [
      { signal_key: "a", classification: "stable", prev_strength: "weak", curr_strength: "weak", priority: false },
      { signal_key: "b", classification: "dead", prev_strength: "strong", curr_strength: null, priority: true },
      { signal_key: "c", classification: "strengthened", prev_strength: "weak", curr_strength: "strong", priority: false },
      { signal_key: "d", classification: "new", prev_strength: null, curr_strength: "emerging", priority: true },
    ],
  };

  it("pins new and dead rows above the rest", () => {
    renderHistoryTimeline(root, diff);
    const keys = [...root.querySelectorAll<HTMLElement>("li.delta")].map(
      (row) => row.dataset.signalKey,
    );
    expect(keys).toEqual(["b", "d", "a", "c"]);
    const pinned = [...root.querySelectorAll("li[data-priority='true']")];
    expect(pinned).toHaveLength(2);
  });

  it("labels a strengthened row with a rank arrow", () => {
    renderHistoryTimeline(root, diff);
    const row = root.querySelector("li[data-signal-key='c']")!;
    expect(row.textContent).toContain("c: strengthened (weak ↑ strong)");
  });

  it("identical snapshots render all-stable, nothing pinned", () => {
    renderHistoryTimeline(root, {
      ...diff,
      deltas: diff.deltas
        .filter((d) => d.classification === "stable")
        .map((d) => ({ ...d })),
    });
    expect(root.querySelectorAll("li[data-priority='true']")).toHaveLength(0);
    expect(
      [...root.querySelectorAll<HTMLElement>("li.delta")].every(
        (row) => row.dataset.classification === "stable",
      ),
    ).toBe(true);
  });

  it("single-session themes show the explanatory empty state", () => {
    renderHistoryTimeline(root, {
      theme_key: "solo",
      available: false,
      sessions_found: 1,
      deltas: [],
    });
    expect(root.querySelector("[data-testid='history-empty']")!.textContent).toContain(
      "Only one recorded session",
    );
  });
});
