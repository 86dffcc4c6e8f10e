// Builders for fabricated server payloads used by the unit tests.

import type {
  GatesPayload,
  GhostySessionPayload,
  GhostyGatesPayload,
  PrecogGatesPayload,
  PrecogSessionPayload,
  VisionPayload,
} from "../src/types.js";

export function ghostySession(
  overrides: Partial<GhostySessionPayload> = {},
): GhostySessionPayload {
  return {
    protocol: "ghosty",
    id: "g1",
    theme: "theme",
    status: "draft",
    revision: 1,
    fragments: [],
    ghosts: [],
    collisions: [],
    gate: null,
    visions: [],
    bridges: [],
    step_timestamps: {},
    warnings: [],
    abort_reason: null,
    ...overrides,
  };
}

export function ghostyGates(
  overrides: Partial<GhostyGatesPayload> = {},
): GhostyGatesPayload {
  return {
    protocol: "ghosty",
    status: "draft",
    pairs_total: 0,
    pairs_scored: 0,
    pending_pairs: [],
    collision_gate: null,
    advancing_visions: [],
    warnings: [],
    abort_reason: null,
    ...overrides,
  };
}

export function precogSession(
  overrides: Partial<PrecogSessionPayload> = {},
): PrecogSessionPayload {
  return {
    protocol: "precog",
    id: "p1",
    theme_key: "theme",
    horizon: "unspecified",
    status: "mapping",
    revision: 1,
    signals: [],
    convergences: [],
    contrarian: null,
    grid_evaluations: [],
    actions: [],
    step_timestamps: {},
    warnings: [],
    ...overrides,
  };
}

export function precogGates(
  overrides: Partial<PrecogGatesPayload> = {},
): PrecogGatesPayload {
  return {
    protocol: "precog",
    status: "mapping",
    signal_count: 0,
    escalation_required: false,
    missing_for_finalize: [],
    warnings: [],
    ...overrides,
  };
}

export function vision(
  id: string,
  ratings: [number, number, number, number],
  advances: boolean,
): VisionPayload {
  return {
    id,
    collision_id: "f1:f2",
    name: `Vision ${id}`,
    one_line: "one line",
    emotion: "calm",
    cinematic_image: "an image",
    why_now: "now",
    ratings: {
      novelty: ratings[0],
      feasibility: ratings[1],
      resonance: ratings[2],
      timing: ratings[3],
    },
    advances,
  };
}

export function fragments(n: number) {
  return Array.from({ length: n }, (_, i) => ({
    id: `f${i + 1}`,
    text: `observation ${i + 1}`,
    domain_tag: `domain-${i + 1}`,
    source_kind: "observation",
    confidence: null,
  }));
}

export function allPairs(ids: string[]): [string, string][] {
  const sorted = [...ids].sort();
  const pairs: [string, string][] = [];
  for (let i = 0; i < sorted.length; i += 1) {
    for (let j = i + 1; j < sorted.length; j += 1) {
      pairs.push([sorted[i], sorted[j]]);
    }
  }
  return pairs;
}

export function gatesFor(session: GhostySessionPayload | PrecogSessionPayload): GatesPayload {
  if (session.protocol === "ghosty") {
    const pairs = allPairs(session.fragments.map((f) => f.id));
    const scored = new Set(session.collisions.map((c) => c.pair.join(":")));
    return ghostyGates({
      status: session.status,
      pairs_total: pairs.length,
      pairs_scored: session.collisions.length,
      pending_pairs: pairs.filter((p) => !scored.has(p.join(":"))),
      collision_gate: session.gate,
      advancing_visions: session.visions.filter((v) => v.advances).map((v) => v.id),
      warnings: session.warnings,
      abort_reason: session.abort_reason,
    });
  }
  return precogGates({ status: session.status, signal_count: session.signals.length });
}
