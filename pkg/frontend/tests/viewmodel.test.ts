import { describe, expect, it } from "vitest";

import { buildViewModel } from "../src/viewmodel.js";
import {
  allPairs,
  fragments,
  gatesFor,
  ghostySession,
  precogGates,
  precogSession,
  vision,
} from "./fixtures.js";

describe("phase locking", () => {
  it("opens only the fragment panel on a fresh session", () => {
    const session = ghostySession({ status: "draft" });
    const vm = buildViewModel(session, gatesFor(session));
    expect(vm.currentPhase).toBe("fragments");
    const open = vm.panels.filter((p) => p.open).map((p) => p.id);
    expect(open).toEqual(["fragments"]);
    expect(vm.panels.filter((p) => p.locked).map((p) => p.id)).toEqual([
      "ghosts",
      "matrix",
      "visions",
      "bridge",
      "done",
    ]);
  });

  it("highlights exactly one open step per status", () => {
    const expectations: [string, string][] = [
      ["ghosting", "ghosts"],
      ["colliding", "matrix"],
      ["crystallizing", "visions"],
      ["bridging", "bridge"],
    ];
    for (const [status, phase] of expectations) {
      const session = ghostySession({ status, fragments: fragments(3) });
      const vm = buildViewModel(session, gatesFor(session));
      expect(vm.currentPhase).toBe(phase);
      expect(vm.panels.filter((p) => p.open)).toHaveLength(1);
    }
  });

  it("locks every panel on terminal sessions", () => {
    const session = ghostySession({ status: "completed" });
    const vm = buildViewModel(session, gatesFor(session));
    expect(vm.terminal).toBe(true);
    expect(vm.panels.every((p) => p.locked)).toBe(true);
  });
});

describe("matrix derivation", () => {
  it("shows 6 pending cells when 4 of 10 pairs are scored", () => {
    const frags = fragments(5);
    const pairs = allPairs(frags.map((f) => f.id));
    const session = ghostySession({
      status: "colliding",
      fragments: frags,
      collisions: pairs.slice(0, 4).map((pair) => ({
        pair,
        score: "interesting" as const,
        rationale: "",
      })),
    });
    const vm = buildViewModel(session, gatesFor(session));
    expect(vm.matrix).toHaveLength(10);
    expect(vm.pendingPairs).toHaveLength(6);
    expect(vm.matrix.filter((c) => c.pending)).toHaveLength(6);
    expect(vm.matrix.filter((c) => c.score !== null)).toHaveLength(4);
  });
});

describe("terminal and flag banners", () => {
  it("aborted sessions surface the abort reason", () => {
    const session = ghostySession({
      status: "aborted_preflight",
      abort_reason: "all 3 fragment(s) share domain tag 'x'",
    });
    const vm = buildViewModel(session, gatesFor(session));
    expect(vm.terminal).toBe(true);
    expect(vm.abortBanner).toContain("share domain tag");
    expect(vm.currentPhase).toBe("aborted");
  });

  it("electric inflation becomes a persistent banner", () => {
    const session = ghostySession({
      status: "crystallizing",
      fragments: fragments(3),
      gate: {
        kind: "advance",
        electric: ["f1:f2", "f1:f3", "f2:f3"],
        electric_inflation: true,
        high_electric_rate: false,
      },
    });
    const vm = buildViewModel(session, gatesFor(session));
    expect(vm.inflationBanner).toMatch(/electric inflation/);
  });

  it("escalation flag from the server becomes a banner", () => {
    const session = precogSession({ status: "timing" });
    const vm = buildViewModel(
      session,
      precogGates({ status: "timing", escalation_required: true }),
    );
    expect(vm.escalationBanner).toBe(
      "escalated contrarian view required: all four timing axes aligned",
    );
  });
});

describe("verdict passthrough", () => {
  it("vision trays mirror the server's advances flag verbatim", () => {
    const session = ghostySession({
      status: "crystallizing",
      fragments: fragments(3),
      visions: [vision("v1", [5, 2, 5, 5], false), vision("v2", [3, 3, 3, 3], true)],
    });
    const vm = buildViewModel(session, gatesFor(session));
    expect(vm.parkedVisions.map((v) => v.id)).toEqual(["v1"]);
    expect(vm.advancingVisions.map((v) => v.id)).toEqual(["v2"]);
  });

  it("judgments are copied, never recomputed", () => {
    const session = precogSession({
      status: "timing",
      grid_evaluations: [
        {
          label: "row",
          grid: {
            market_phase: "acceleration",
            competitive: "fast_follower",
            readiness: "ready",
            external_window: "open",
            annotation: "",
          },
          // Deliberately inconsistent with the table: the client must
          // still display exactly what the server said.
          judgment: { overall: "watch", polarity_sum: -9, escalated_contrarian_required: true },
        },
      ],
    });
    const vm = buildViewModel(session, gatesFor(session));
    expect(vm.judgments[0].judgment.overall).toBe("watch");
    expect(vm.judgments[0].judgment.polarity_sum).toBe(-9);
  });
});
