// Wire types mirroring the server's session payloads and envelopes.
// Every verdict field (gate kind, advances, overall, escalation) is data
// the server computed; the client only ever copies these values.

export interface ApiError {
  code: string;
  message: string;
  field_path: string | null;
}

export type Envelope<T> =
  | { ok: true; data: T }
  | { ok: false; error: ApiError };

export interface FragmentPayload {
  id: string;
  text: string;
  domain_tag: string;
  source_kind: string;
  confidence: string | null;
}

export interface GhostPayload {
  fragment_id: string;
  structural_description: string;
  checklist: {
    uses_verbs: boolean;
    includes_emotion: boolean;
    cross_domain_comprehensible: boolean;
    reversibility_pass: boolean;
  };
  shallow_warning: string;
}

export interface CollisionPayload {
  pair: [string, string];
  score: "boring" | "interesting" | "electric";
  rationale: string;
}

export interface GateOutcomePayload {
  kind: "advance" | "abort_no_electric";
  electric: string[];
  electric_inflation: boolean;
  high_electric_rate: boolean;
}

export interface RatingsPayload {
  novelty: number;
  feasibility: number;
  resonance: number;
  timing: number;
}

export interface VisionPayload {
  id: string;
  collision_id: string;
  name: string;
  one_line: string;
  emotion: string;
  cinematic_image: string;
  why_now: string;
  ratings: RatingsPayload;
  advances: boolean;
}

export interface BridgePayload {
  vision_id: string;
  mvv: string;
  existing_capabilities: string[];
  kill_conditions: string[];
  first_step_24h: string;
}

export interface GhostySessionPayload {
  protocol: "ghosty";
  id: string;
  theme: string;
  status: string;
  revision: number;
  fragments: FragmentPayload[];
  ghosts: GhostPayload[];
  collisions: CollisionPayload[];
  gate: GateOutcomePayload | null;
  visions: VisionPayload[];
  bridges: BridgePayload[];
  step_timestamps: Record<string, string>;
  warnings: string[];
  abort_reason: string | null;
}

export interface SignalPayload {
  key: string;
  description: string;
  evidence: { claim: string; source: string }[];
  strength: string;
  direction: string;
  confidence: string;
  source_kind: string;
}

export interface ConvergencePayload {
  id: string;
  signal_keys: string[];
  hypothesis: string;
  causal_logic: string;
  confidence: string;
  confidence_rationale: string;
}

export interface GridPayload {
  market_phase: string;
  competitive: string;
  readiness: string;
  external_window: string;
  annotation: string;
}

export interface JudgmentPayload {
  overall: "go" | "soon" | "watch";
  polarity_sum: number;
  escalated_contrarian_required: boolean;
}

export interface GridEvaluationPayload {
  label: string;
  grid: GridPayload;
  judgment: JudgmentPayload;
}

export interface ActionPayload {
  id: string;
  category: string;
  action: string;
  trigger: string;
  cost_estimate: string;
}

export interface PrecogSessionPayload {
  protocol: "precog";
  id: string;
  theme_key: string;
  horizon: string;
  status: string;
  revision: number;
  signals: SignalPayload[];
  convergences: ConvergencePayload[];
  contrarian: {
    overestimation_reason: string;
    scenarios: unknown[];
  } | null;
  grid_evaluations: GridEvaluationPayload[];
  actions: ActionPayload[];
  step_timestamps: Record<string, string>;
  warnings: string[];
}

export type SessionPayload = GhostySessionPayload | PrecogSessionPayload;

export interface GhostyGatesPayload {
  protocol: "ghosty";
  status: string;
  pairs_total: number;
  pairs_scored: number;
  pending_pairs: [string, string][];
  collision_gate: GateOutcomePayload | null;
  advancing_visions: string[];
  warnings: string[];
  abort_reason: string | null;
}

export interface PrecogGatesPayload {
  protocol: "precog";
  status: string;
  signal_count: number;
  escalation_required: boolean;
  missing_for_finalize: string[];
  warnings: string[];
}

export type GatesPayload = GhostyGatesPayload | PrecogGatesPayload;

export interface HistoryDelta {
  signal_key: string;
  classification: "strengthened" | "stable" | "weakened" | "new" | "dead";
  prev_strength: string | null;
  curr_strength: string | null;
  priority: boolean;
}

export interface HistoryDiffPayload {
  theme_key: string;
  available: boolean;
  sessions_found: number;
  prev_session?: string;
  curr_session?: string;
  deltas: HistoryDelta[];
}
