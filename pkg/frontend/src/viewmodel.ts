// Derivation of everything the board displays from the last server
// response. No gate verdict is ever computed here: outcome kinds,
// advances flags, judgments and escalation state are copied verbatim
// from the payloads the server returned.

import type {
  GatesPayload,
  GateOutcomePayload,
  GridEvaluationPayload,
  SessionPayload,
  VisionPayload,
} from "./types.js";

export interface PanelState {
  id: string;
  title: string;
  open: boolean;
  locked: boolean;
}

export interface MatrixCell {
  pair: [string, string];
  score: "boring" | "interesting" | "electric" | null;
  pending: boolean;
}

export interface SessionViewModel {
  protocol: "ghosty" | "precog";
  sessionId: string;
  status: string;
  currentPhase: string;
  terminal: boolean;
  panels: PanelState[];
  abortBanner: string | null;
  warningBanners: string[];
  escalationBanner: string | null;
  inflationBanner: string | null;
  pendingPairs: [string, string][];
  matrix: MatrixCell[];
  gateOutcome: GateOutcomePayload | null;
  advancingVisions: VisionPayload[];
  parkedVisions: VisionPayload[];
  judgments: GridEvaluationPayload[];
  missingForFinalize: string[];
  session: SessionPayload;
}

const GHOSTY_PHASES: [string, string, string][] = [
  ["draft", "fragments", "Fragments"],
  ["ghosting", "ghosts", "Ghost extraction"],
  ["colliding", "matrix", "Collision matrix"],
  ["crystallizing", "visions", "Vision crystallization"],
  ["bridging", "bridge", "Reality bridge"],
  ["completed", "done", "Completed"],
];

const PRECOG_PHASES: [string, string, string][] = [
  ["mapping", "signals", "Signal map"],
  ["converging", "convergences", "Convergence analysis"],
  ["contrarian", "contrarian", "Contrarian view"],
  ["timing", "grid", "Timing grid"],
  ["acting", "actions", "Action window"],
  ["completed", "done", "Completed"],
];

function panelsFor(
  table: [string, string, string][],
  status: string,
  terminal: boolean,
): { panels: PanelState[]; currentPhase: string } {
  const row = table.find(([s]) => s === status);
  const currentPhase = row ? row[1] : "aborted";
  const panels = table.map(([s, id, title]) => ({
    id,
    title,
    open: !terminal && s === status,
    locked: terminal || s !== status,
  }));
  return { panels, currentPhase };
}

export function buildMatrix(
  session: SessionPayload,
  pendingPairs: [string, string][],
): MatrixCell[] {
  if (session.protocol !== "ghosty") return [];
  const ids = session.fragments.map((f) => f.id).sort();
  const scored = new Map(
    session.collisions.map((c) => [c.pair.join(":"), c.score] as const),
  );
  const pending = new Set(pendingPairs.map((p) => p.join(":")));
  const cells: MatrixCell[] = [];
  for (let i = 0; i < ids.length; i += 1) {
    for (let j = i + 1; j < ids.length; j += 1) {
      const pair: [string, string] = [ids[i], ids[j]];
      const key = pair.join(":");
      cells.push({
        pair,
        score: scored.get(key) ?? null,
        pending: pending.has(key),
      });
    }
  }
  return cells;
}

export function buildViewModel(
  session: SessionPayload,
  gates: GatesPayload,
): SessionViewModel {
  const terminalStatuses = new Set([
    "completed",
    "aborted_preflight",
    "aborted_no_electric",
  ]);
  const terminal = terminalStatuses.has(session.status);

  if (session.protocol === "ghosty") {
    const ghostyGates = gates.protocol === "ghosty" ? gates : null;
    const { panels, currentPhase } = panelsFor(GHOSTY_PHASES, session.status, terminal);
    const pendingPairs = ghostyGates?.pending_pairs ?? [];
    const gateOutcome = session.gate;
    const inflation =
      gateOutcome?.electric_inflation
        ? "electric inflation: every collision scored electric"
        : gateOutcome?.high_electric_rate
          ? "high electric rate across the matrix"
          : null;
    return {
      protocol: "ghosty",
      sessionId: session.id,
      status: session.status,
      currentPhase: terminal && session.abort_reason ? "aborted" : currentPhase,
      terminal,
      panels,
      abortBanner: session.abort_reason,
      warningBanners: [...session.warnings],
      escalationBanner: null,
      inflationBanner: inflation,
      pendingPairs,
      matrix: buildMatrix(session, pendingPairs),
      gateOutcome,
      advancingVisions: session.visions.filter((v) => v.advances),
      parkedVisions: session.visions.filter((v) => !v.advances),
      judgments: [],
      missingForFinalize: [],
      session,
    };
  }

  const precogGates = gates.protocol === "precog" ? gates : null;
  const { panels, currentPhase } = panelsFor(PRECOG_PHASES, session.status, terminal);
  const escalation =
    precogGates?.escalation_required
      ? "escalated contrarian view required: all four timing axes aligned"
      : null;
  return {
    protocol: "precog",
    sessionId: session.id,
    status: session.status,
    currentPhase,
    terminal,
    panels,
    abortBanner: null,
    warningBanners: [...session.warnings],
    escalationBanner: escalation,
    inflationBanner: null,
    pendingPairs: [],
    matrix: [],
    gateOutcome: null,
    advancingVisions: [],
    parkedVisions: [],
    judgments: session.grid_evaluations,
    missingForFinalize: precogGates?.missing_for_finalize ?? [],
    session,
  };
}
