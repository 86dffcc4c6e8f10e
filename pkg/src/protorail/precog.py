"""Signal-based foresight session engine with a four-axis timing grid.

A session moves through the strict linear order

    mapping -> converging -> contrarian -> timing -> acting -> completed

Phase advances are operator-initiated via :meth:`PrecogSession.advance`;
each transition checks the leaving phase's minimum output (3..8 signals,
>= 1 convergence, a contrarian view, >= 1 grid evaluation).

The timing grid is a pure total function over the four axis enums: each
axis value maps to a polarity in {-1, 0, +1}; the sum drives the overall
call (go / soon / watch) and full alignment of all four polarities — all
+1 or all -1 — trips the over-determination tripwire, which makes an
escalated contrarian view (>= 2 scenarios) mandatory before finalize.
Alignment in either direction escalates: confirmation bias cuts both
ways.

Every signal carries a mandatory confidence tag; evidence is never
optional. Convergence hypotheses are checked for one-sentence form only
advisorily — prose style never hard-fails a session.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .config import Config, DEFAULT_CONFIG
from .errors import ProtocolError
from .util import iso_utc, now_utc
from .collider import Confidence

SIGNAL_MIN = 3
SIGNAL_MAX = 8


class SignalStrength(str, Enum):
    STRONG = "strong"
    EMERGING = "emerging"
    WEAK = "weak"


STRENGTH_RANK = {
    SignalStrength.WEAK: 0,
    SignalStrength.EMERGING: 1,
    SignalStrength.STRONG: 2,
}


class SignalDirection(str, Enum):
    ACCELERATING = "accelerating"
    STABLE = "stable"
    DECELERATING = "decelerating"


DIRECTION_RANK = {
    SignalDirection.DECELERATING: 0,
    SignalDirection.STABLE: 1,
    SignalDirection.ACCELERATING: 2,
}


class SignalSource(str, Enum):
    NUMERIC = "numeric"
    BEHAVIORAL = "behavioral"
    NARRATIVE = "narrative"
    ABSENT = "absent"


class ConvergenceConfidence(str, Enum):
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"


class MarketPhase(str, Enum):
    PRE_EMERGENCE = "pre_emergence"
    EMERGENCE = "emergence"
    ACCELERATION = "acceleration"
    PEAK = "peak"
    CORRECTION = "correction"
    PLATEAU = "plateau"


class CompetitivePosition(str, Enum):
    FIRST_MOVER = "first_mover"
    FAST_FOLLOWER = "fast_follower"
    FORTIFIER = "fortifier"
    TOO_LATE = "too_late"
    UNDEFINED = "undefined"


class Readiness(str, Enum):
    NOT_READY = "not_ready"
    PARTIALLY_READY = "partially_ready"
    READY = "ready"


class ExternalWindow(str, Enum):
    OPEN = "open"
    OPENING = "opening"
    CLOSED = "closed"


class TimingCall(str, Enum):
    GO = "go"
    SOON = "soon"
    WATCH = "watch"


class ActionCategory(str, Enum):
    NOW = "now"
    SOON = "soon"
    WATCH = "watch"
    KILL = "kill"


class PrecogStatus(str, Enum):
    MAPPING = "mapping"
    CONVERGING = "converging"
    CONTRARIAN = "contrarian"
    TIMING = "timing"
    ACTING = "acting"
    COMPLETED = "completed"


PRECOG_ORDER = [
    PrecogStatus.MAPPING,
    PrecogStatus.CONVERGING,
    PrecogStatus.CONTRARIAN,
    PrecogStatus.TIMING,
    PrecogStatus.ACTING,
    PrecogStatus.COMPLETED,
]


@dataclass
class Evidence:
    claim: str
    source: str


@dataclass
class Signal:
    """One observable indicator, keyed for cross-session tracking."""

    key: str
    description: str
    evidence: list[Evidence]
    strength: SignalStrength
    direction: SignalDirection
    confidence: Confidence
    source_kind: SignalSource

    def validate(self, path: str = "signal") -> None:
        if not self.key.strip():
            raise ProtocolError("empty_field", "signal key must be non-empty", f"{path}.key")
        if not self.description.strip():
            raise ProtocolError(
                "empty_field", "signal description must be non-empty", f"{path}.description"
            )
        if not self.evidence:
            raise ProtocolError(
                "empty_evidence",
                "a signal requires at least one evidence entry",
                f"{path}.evidence",
            )
        for i, item in enumerate(self.evidence):
            if not item.claim.strip() or not item.source.strip():
                raise ProtocolError(
                    "empty_evidence",
                    "evidence entries need both a claim and a source",
                    f"{path}.evidence.{i}",
                )
        if self.confidence is None:
            raise ProtocolError(
                "missing_confidence",
                "every signal carries a confidence tag",
                f"{path}.confidence",
            )


@dataclass
class ConvergencePoint:
    """A structural hypothesis explaining where >= 2 signals intersect."""

    id: str
    signal_keys: list[str]
    hypothesis: str
    causal_logic: str
    confidence: ConvergenceConfidence
    confidence_rationale: str

    def validate(self, path: str = "convergence") -> None:
        if len(self.signal_keys) < 2:
            raise ProtocolError(
                "too_few_signals",
                "a convergence point needs at least two contributing signals",
                f"{path}.signal_keys",
            )
        if not self.hypothesis.strip():
            raise ProtocolError(
                "empty_field", "hypothesis must be non-empty", f"{path}.hypothesis"
            )
        if not self.causal_logic.strip():
            raise ProtocolError(
                "empty_field", "causal_logic must be non-empty", f"{path}.causal_logic"
            )
        if not self.confidence_rationale.strip():
            raise ProtocolError(
                "empty_field",
                "confidence_rationale must be non-empty",
                f"{path}.confidence_rationale",
            )

    def one_sentence(self) -> bool:
        # Advisory heuristic: exactly one terminal punctuation mark.
        return sum(self.hypothesis.count(ch) for ch in ".!?") == 1


@dataclass
class ContrarianScenario:
    description: str
    historical_analogy: str
    preconditions: list[str]
    collapse_trigger: str
    probability_low: float
    probability_high: float

    def validate(self, path: str = "scenario") -> None:
        if not self.description.strip():
            raise ProtocolError(
                "empty_field", "scenario description must be non-empty", f"{path}.description"
            )
        if not self.historical_analogy.strip():
            raise ProtocolError(
                "missing_analogy",
                "each contrarian scenario needs a historical analogy",
                f"{path}.historical_analogy",
            )
        if not [p for p in self.preconditions if p.strip()]:
            raise ProtocolError(
                "empty_field",
                "scenario preconditions must be non-empty",
                f"{path}.preconditions",
            )
        if not self.collapse_trigger.strip():
            raise ProtocolError(
                "empty_field",
                "scenario collapse_trigger must be non-empty",
                f"{path}.collapse_trigger",
            )
        low, high = self.probability_low, self.probability_high
        if not (0.0 <= low <= high <= 1.0):
            raise ProtocolError(
                "bad_probability",
                f"probability interval must satisfy 0 <= low <= high <= 1, got ({low}, {high})",
                f"{path}.probability_low",
            )


@dataclass
class ContrarianView:
    overestimation_reason: str
    scenarios: list[ContrarianScenario]

    def validate(self, path: str = "contrarian") -> None:
        if not self.overestimation_reason.strip():
            raise ProtocolError(
                "missing_overestimation_reason",
                "state at least one reason the dominant view may be overestimated",
                f"{path}.overestimation_reason",
            )
        if not self.scenarios:
            raise ProtocolError(
                "empty_scenarios",
                "a contrarian view needs at least one scenario",
                f"{path}.scenarios",
            )
        for i, scenario in enumerate(self.scenarios):
            scenario.validate(f"{path}.scenarios.{i}")


@dataclass
class TimingGrid:
    market_phase: MarketPhase
    competitive: CompetitivePosition
    readiness: Readiness
    external_window: ExternalWindow
    annotation: str = ""


@dataclass
class TimingJudgment:
    overall: TimingCall
    polarity_sum: int
    escalated_contrarian_required: bool


@dataclass
class GridEvaluation:
    label: str
    grid: TimingGrid
    judgment: TimingJudgment


@dataclass
class ActionItem:
    id: str
    category: ActionCategory
    action: str
    trigger: str
    cost_estimate: str

    def validate(self, path: str = "action") -> None:
        if not self.action.strip():
            raise ProtocolError(
                "empty_field", "action description must be non-empty", f"{path}.action"
            )
        if not self.trigger.strip():
            raise ProtocolError(
                "missing_trigger", "every action needs an execution trigger", f"{path}.trigger"
            )
        if not self.cost_estimate.strip():
            raise ProtocolError(
                "missing_cost", "every action needs a cost estimate", f"{path}.cost_estimate"
            )


def axis_polarities(grid: TimingGrid, config: Config = DEFAULT_CONFIG) -> tuple[int, int, int, int]:
    table = config.polarity
    return (
        table["market_phase"][grid.market_phase.value],
        table["competitive"][grid.competitive.value],
        table["readiness"][grid.readiness.value],
        table["external_window"][grid.external_window.value],
    )


def evaluate_timing_grid(grid: TimingGrid, config: Config = DEFAULT_CONFIG) -> TimingJudgment:
    """Pure, total judgment over the four axes.

    overall: go when the polarity sum >= 3, soon when in [1, 2],
    watch when <= 0. Escalation fires exactly when all four polarities
    are +1 or all four are -1 (over-determination in either direction).
    """
    polarities = axis_polarities(grid, config)
    total = sum(polarities)
    if total >= config.go_min:
        overall = TimingCall.GO
    elif total >= config.soon_min:
        overall = TimingCall.SOON
    else:
        overall = TimingCall.WATCH
    aligned = all(p == 1 for p in polarities) or all(p == -1 for p in polarities)
    return TimingJudgment(
        overall=overall, polarity_sum=total, escalated_contrarian_required=aligned
    )


@dataclass
class PrecogSession:
    """One foresight run; theme_key is the longitudinal identity."""

    id: str
    theme_key: str
    horizon: str = "unspecified"
    status: PrecogStatus = PrecogStatus.MAPPING
    signals: list[Signal] = field(default_factory=list)
    convergences: list[ConvergencePoint] = field(default_factory=list)
    contrarian: ContrarianView | None = None
    grid_evaluations: list[GridEvaluation] = field(default_factory=list)
    actions: list[ActionItem] = field(default_factory=list)
    step_timestamps: dict[str, str] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    revision: int = 0

    @classmethod
    def new(cls, theme_key: str, id: str, horizon: str = "unspecified") -> "PrecogSession":
        session = cls(id=id, theme_key=theme_key, horizon=horizon)
        session._stamp(PrecogStatus.MAPPING)
        return session

    def _stamp(self, status: PrecogStatus) -> None:
        self.status = status
        self.step_timestamps[status.value] = iso_utc(now_utc())

    def _require(self, *statuses: PrecogStatus) -> None:
        if self.status not in statuses:
            wanted = " or ".join(s.value for s in statuses)
            raise ProtocolError(
                "wrong_phase",
                f"operation requires status {wanted}, session is {self.status.value}",
            )

    def signal_by_key(self, key: str) -> Signal | None:
        for s in self.signals:
            if s.key == key:
                return s
        return None

    def convergence_by_id(self, cid: str) -> ConvergencePoint | None:
        for c in self.convergences:
            if c.id == cid:
                return c
        return None

    # --- step 1: signal map --------------------------------------------------

    def add_signal(self, signal: Signal) -> "PrecogSession":
        self._require(PrecogStatus.MAPPING)
        if len(self.signals) >= SIGNAL_MAX:
            raise ProtocolError(
                "too_many_signals",
                f"a session maps at most {SIGNAL_MAX} signals",
                "signals",
            )
        signal.validate()
        if self.signal_by_key(signal.key) is not None:
            raise ProtocolError(
                "duplicate_signal", f"signal key {signal.key!r} already mapped", "signal.key"
            )
        self.signals.append(signal)
        return self

    # --- step 2: convergence analysis -----------------------------------------

    def add_convergence(self, convergence: ConvergencePoint) -> "PrecogSession":
        self._require(PrecogStatus.CONVERGING)
        convergence.validate()
        if self.convergence_by_id(convergence.id) is not None:
            raise ProtocolError(
                "duplicate_convergence",
                f"convergence id {convergence.id!r} already present",
                "convergence.id",
            )
        for i, key in enumerate(convergence.signal_keys):
            if self.signal_by_key(key) is None:
                raise ProtocolError(
                    "unknown_signal",
                    f"convergence cites unmapped signal {key!r}",
                    f"convergence.signal_keys.{i}",
                )
        if not convergence.one_sentence():
            self.warnings.append(
                f"convergence {convergence.id}: hypothesis should be a single sentence"
            )
        self.convergences.append(convergence)
        return self

    # --- step 3: contrarian view ------------------------------------------------

    def set_contrarian(self, view: ContrarianView) -> "PrecogSession":
        self._require(PrecogStatus.CONTRARIAN)
        view.validate()
        self.contrarian = view
        return self

    # --- step 4: timing grid -------------------------------------------------

    def record_grid(
        self, label: str, grid: TimingGrid, config: Config = DEFAULT_CONFIG
    ) -> TimingJudgment:
        self._require(PrecogStatus.TIMING)
        if not label.strip():
            raise ProtocolError("empty_field", "grid label must be non-empty", "grid.label")
        if any(e.label == label for e in self.grid_evaluations):
            raise ProtocolError(
                "duplicate_grid", f"grid label {label!r} already evaluated", "grid.label"
            )
        judgment = evaluate_timing_grid(grid, config)
        self.grid_evaluations.append(GridEvaluation(label=label, grid=grid, judgment=judgment))
        if judgment.escalated_contrarian_required:
            self.warnings.append(
                f"grid {label!r}: all four axes aligned — escalated contrarian view required"
            )
        return judgment

    # --- step 5: action window -----------------------------------------------

    def add_action(self, item: ActionItem) -> "PrecogSession":
        self._require(PrecogStatus.ACTING)
        item.validate()
        if any(a.id == item.id for a in self.actions):
            raise ProtocolError(
                "duplicate_action", f"action id {item.id!r} already present", "action.id"
            )
        self.actions.append(item)
        return self

    # --- phase control ----------------------------------------------------------

    def escalation_required(self) -> bool:
        return any(e.judgment.escalated_contrarian_required for e in self.grid_evaluations)

    def unmet_requirements(self) -> list[str]:
        """Completeness requirements still missing for finalize."""
        missing = []
        if not SIGNAL_MIN <= len(self.signals) <= SIGNAL_MAX:
            missing.append(f"{SIGNAL_MIN}..{SIGNAL_MAX} signals (have {len(self.signals)})")
        if not self.convergences:
            missing.append("at least one convergence point")
        if self.contrarian is None:
            missing.append("a contrarian view")
        if not self.grid_evaluations:
            missing.append("at least one timing-grid evaluation")
        if not self.actions:
            missing.append("at least one action item")
        if (
            self.escalation_required()
            and (self.contrarian is None or len(self.contrarian.scenarios) < 2)
        ):
            missing.append(
                "escalated contrarian view: >= 2 scenarios (all four timing axes aligned)"
            )
        return missing

    def advance(self) -> "PrecogSession":
        """Move to the next phase once the current one's floor is met."""
        gates = {
            PrecogStatus.MAPPING: (
                len(self.signals) >= SIGNAL_MIN,
                f"need at least {SIGNAL_MIN} signals, have {len(self.signals)}",
                PrecogStatus.CONVERGING,
            ),
            PrecogStatus.CONVERGING: (
                bool(self.convergences),
                "need at least one convergence point",
                PrecogStatus.CONTRARIAN,
            ),
            PrecogStatus.CONTRARIAN: (
                self.contrarian is not None,
                "need a contrarian view",
                PrecogStatus.TIMING,
            ),
            PrecogStatus.TIMING: (
                bool(self.grid_evaluations),
                "need at least one timing-grid evaluation",
                PrecogStatus.ACTING,
            ),
        }
        if self.status not in gates:
            raise ProtocolError(
                "wrong_phase",
                f"cannot advance from {self.status.value}; use finalize to complete",
            )
        ok, why, nxt = gates[self.status]
        if not ok:
            raise ProtocolError("phase_incomplete", why)
        self._stamp(nxt)
        return self

    def finalize(self) -> "PrecogSession":
        self._require(PrecogStatus.ACTING)
        missing = self.unmet_requirements()
        if missing:
            raise ProtocolError(
                "incomplete_session", "cannot finalize; missing: " + "; ".join(missing)
            )
        self._stamp(PrecogStatus.COMPLETED)
        return self
