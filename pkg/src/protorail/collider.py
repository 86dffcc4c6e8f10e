"""Fragment-collision session engine: the gated 5-step creative workflow.

A session moves through a strict linear order

    draft -> ghosting -> colliding -> crystallizing -> bridging -> completed

with two legitimate terminal aborts:

    aborted_preflight    all fragment domain tags equal, caught BEFORE any
                         ghost writing (the expensive step)
    aborted_no_electric  full matrix scored, nothing electric

Aborts are recorded outcomes, never exceptions — reporting "no electric
collisions found" is a permitted result, and forcing a connection to avoid
it is the anti-pattern.

Gates enforced here:
    - 3..5 fragments and at least two distinct domain tags before ghosting
    - a ghost is accepted only with all four checklist assertions true
    - rationale is mandatory for electric collision scores
    - crystallizing is reachable only with >= 1 electric collision
    - a vision advances to bridging only when all four ratings are >= 3
    - a reality bridge needs >= 1 kill condition and a 24-hour first step

The engine never generates or judges prose. Checklist booleans, collision
scores and ratings are operator assertions; the engine enforces that the
assertion was made, not that it is true. The one lexical heuristic
(shallow-ghost detection) is advisory and never blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .config import Config, DEFAULT_CONFIG
from .errors import ProtocolError
from .util import iso_utc, now_utc, tokens

FRAGMENT_MIN = 3
FRAGMENT_MAX = 5


class SourceKind(str, Enum):
    QUANTITATIVE_DATA = "quantitative_data"
    OBSERVATION = "observation"
    AESTHETIC = "aesthetic"
    GUT_FEELING = "gut_feeling"
    ABSENT_PATTERN = "absent_pattern"
    EXPERIENCE = "experience"
    CONSTRAINT = "constraint"


class Confidence(str, Enum):
    VERIFIED = "verified"
    REPORTED = "reported"
    SPECULATIVE = "speculative"


# Weakest-first rank; used when convergence evidence is carried forward
# onto fragments (a chain is as reliable as its weakest signal).
CONFIDENCE_RANK = {
    Confidence.SPECULATIVE: 0,
    Confidence.REPORTED: 1,
    Confidence.VERIFIED: 2,
}


class CollisionScore(str, Enum):
    BORING = "boring"
    INTERESTING = "interesting"
    ELECTRIC = "electric"


class ColliderStatus(str, Enum):
    DRAFT = "draft"
    GHOSTING = "ghosting"
    COLLIDING = "colliding"
    CRYSTALLIZING = "crystallizing"
    BRIDGING = "bridging"
    COMPLETED = "completed"
    ABORTED_PREFLIGHT = "aborted_preflight"
    ABORTED_NO_ELECTRIC = "aborted_no_electric"


# Linear phase order; aborts are terminal branches off draft/colliding.
STATUS_ORDER = [
    ColliderStatus.DRAFT,
    ColliderStatus.GHOSTING,
    ColliderStatus.COLLIDING,
    ColliderStatus.CRYSTALLIZING,
    ColliderStatus.BRIDGING,
    ColliderStatus.COMPLETED,
]

TERMINAL_STATUSES = {
    ColliderStatus.COMPLETED,
    ColliderStatus.ABORTED_PREFLIGHT,
    ColliderStatus.ABORTED_NO_ELECTRIC,
}


@dataclass
class Fragment:
    """A raw input observation from any domain."""

    id: str
    text: str
    domain_tag: str
    source_kind: SourceKind
    # Present only on fragments imported from a foresight session, where
    # evidence confidence carries forward as metadata.
    confidence: Confidence | None = None

    def validate(self, path: str = "fragment") -> None:
        if not self.id.strip():
            raise ProtocolError("empty_field", "fragment id must be non-empty", f"{path}.id")
        if not self.text.strip():
            raise ProtocolError("empty_field", "fragment text must be non-empty", f"{path}.text")
        if not self.domain_tag.strip():
            raise ProtocolError(
                "empty_field", "fragment domain_tag must be non-empty", f"{path}.domain_tag"
            )


@dataclass
class GhostChecklist:
    """Operator-asserted quality criteria for one ghost."""

    uses_verbs: bool = False
    includes_emotion: bool = False
    cross_domain_comprehensible: bool = False
    reversibility_pass: bool = False

    def all_true(self) -> bool:
        return (
            self.uses_verbs
            and self.includes_emotion
            and self.cross_domain_comprehensible
            and self.reversibility_pass
        )

    def failing(self) -> list[str]:
        return [name for name, value in vars(self).items() if not value]


@dataclass
class Ghost:
    """De-labeled structural description of one fragment."""

    fragment_id: str
    structural_description: str
    checklist: GhostChecklist
    # Set by the engine on attach; advisory only.
    shallow_warning: str = "none"


@dataclass
class Collision:
    """One scored pair of the matrix. ``pair`` is stored normalized."""

    pair: tuple[str, str]
    score: CollisionScore
    rationale: str = ""

    @property
    def id(self) -> str:
        return pair_id(self.pair)


def normalize_pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def pair_id(pair: tuple[str, str]) -> str:
    a, b = normalize_pair(*pair)
    return f"{a}:{b}"


@dataclass
class VisionRatings:
    novelty: int
    feasibility: int
    resonance: int
    timing: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.novelty, self.feasibility, self.resonance, self.timing)

    def minimum(self) -> int:
        return min(self.as_tuple())

    def validate(self, path: str = "ratings") -> None:
        for name, value in vars(self).items():
            if not isinstance(value, int) or not 1 <= value <= 5:
                raise ProtocolError(
                    "rating_out_of_range",
                    f"rating {name} must be an integer in 1..5, got {value!r}",
                    f"{path}.{name}",
                )


@dataclass
class Vision:
    """A named concept crystallized from one electric collision."""

    id: str
    collision_id: str
    name: str
    one_line: str
    emotion: str
    cinematic_image: str
    why_now: str
    ratings: VisionRatings

    @property
    def advances(self) -> bool:
        return self.ratings.minimum() >= 3

    def validate(self, path: str = "vision") -> None:
        for fname in ("name", "one_line", "emotion", "cinematic_image", "why_now"):
            if not getattr(self, fname).strip():
                raise ProtocolError(
                    "empty_field", f"vision {fname} must be non-empty", f"{path}.{fname}"
                )
        self.ratings.validate(f"{path}.ratings")


@dataclass
class RealityBridge:
    """Grounding of a vision in executable terms."""

    vision_id: str
    mvv: str
    existing_capabilities: list[str] = field(default_factory=list)
    kill_conditions: list[str] = field(default_factory=list)
    first_step_24h: str = ""

    def validate(self, path: str = "bridge") -> None:
        if not self.mvv.strip():
            raise ProtocolError("empty_field", "bridge mvv must be non-empty", f"{path}.mvv")
        if not [k for k in self.kill_conditions if k.strip()]:
            raise ProtocolError(
                "empty_kill_conditions",
                "a reality bridge needs at least one kill condition",
                f"{path}.kill_conditions",
            )
        if not self.first_step_24h.strip():
            raise ProtocolError(
                "empty_field",
                "bridge first_step_24h must be non-empty",
                f"{path}.first_step_24h",
            )


@dataclass
class CheckResult:
    ok: bool
    reason: str | None = None


@dataclass
class GateOutcome:
    """Result of the collision gate over a fully scored matrix."""

    kind: str  # "advance" | "abort_no_electric"
    electric: list[str] = field(default_factory=list)
    electric_inflation: bool = False
    high_electric_rate: bool = False


def preflight_diversity(fragments: list[Fragment]) -> CheckResult:
    """Fail iff every fragment carries the same (case-folded) domain tag.

    Total function, run before any ghost writing: homogeneous inputs
    cannot produce electric collisions, so the session aborts before the
    expensive step rather than after it.
    """
    seen = {f.domain_tag.strip().casefold() for f in fragments}
    if len(seen) <= 1:
        only = next(iter(seen)) if seen else ""
        return CheckResult(
            False,
            f"all {len(fragments)} fragment(s) share domain tag {only!r}; "
            "at least one external-domain fragment is required",
        )
    return CheckResult(True)


def shallow_ghost_warning(
    fragment: Fragment, ghost_text: str, config: Config = DEFAULT_CONFIG
) -> str:
    """Advisory check that a ghost actually de-labels its fragment.

    Two token-overlap ratios, both case-folded and stopword-stripped:

        recycled  = |(frag text+tag tokens) & ghost tokens| / |ghost tokens|
        label_hit = |frag text tokens & ghost tokens| / |frag text tokens|

    Warn when either exceeds the threshold: ``recycled`` catches a ghost
    that merely rearranges the fragment's own wording, ``label_hit``
    catches a ghost that keeps the label term(s) instead of stripping
    them. Never blocks.
    """
    ghost_tokens = tokens(ghost_text)
    text_tokens = tokens(fragment.text)
    frag_tokens = text_tokens | tokens(fragment.domain_tag)
    recycled = len(frag_tokens & ghost_tokens) / len(ghost_tokens) if ghost_tokens else 0.0
    label_hit = len(text_tokens & ghost_tokens) / len(text_tokens) if text_tokens else 0.0
    return "warn" if max(recycled, label_hit) > config.shallow_ghost_threshold else "none"


@dataclass
class ColliderSession:
    """One protocol run; all mutations go through the gate methods."""

    id: str
    theme: str
    status: ColliderStatus = ColliderStatus.DRAFT
    fragments: list[Fragment] = field(default_factory=list)
    ghosts: list[Ghost] = field(default_factory=list)
    collisions: list[Collision] = field(default_factory=list)
    visions: list[Vision] = field(default_factory=list)
    bridges: list[RealityBridge] = field(default_factory=list)
    gate: GateOutcome | None = None
    step_timestamps: dict[str, str] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    abort_reason: str | None = None
    revision: int = 0

    @classmethod
    def draft(cls, theme: str, id: str) -> "ColliderSession":
        session = cls(id=id, theme=theme)
        session._stamp(ColliderStatus.DRAFT)
        return session

    # --- internal helpers -------------------------------------------------

    def _stamp(self, status: ColliderStatus) -> None:
        self.status = status
        self.step_timestamps[status.value] = iso_utc(now_utc())

    def _require(self, *statuses: ColliderStatus) -> None:
        if self.status not in statuses:
            wanted = " or ".join(s.value for s in statuses)
            raise ProtocolError(
                "wrong_phase",
                f"operation requires status {wanted}, session is {self.status.value}",
            )

    def fragment_by_id(self, fragment_id: str) -> Fragment:
        for f in self.fragments:
            if f.id == fragment_id:
                return f
        raise ProtocolError(
            "unknown_fragment", f"no fragment with id {fragment_id!r}", "fragment_id"
        )

    def ghost_for(self, fragment_id: str) -> Ghost | None:
        for g in self.ghosts:
            if g.fragment_id == fragment_id:
                return g
        return None

    def collision_by_id(self, collision_id: str) -> Collision | None:
        for c in self.collisions:
            if c.id == collision_id:
                return c
        return None

    def vision_by_id(self, vision_id: str) -> Vision | None:
        for v in self.visions:
            if v.id == vision_id:
                return v
        return None

    # --- step 1: fragment harvest ----------------------------------------

    def add_fragment(self, fragment: Fragment) -> "ColliderSession":
        self._require(ColliderStatus.DRAFT)
        fragment.validate()
        if any(f.id == fragment.id for f in self.fragments):
            raise ProtocolError(
                "duplicate_fragment", f"fragment id {fragment.id!r} already present", "fragment.id"
            )
        if len(self.fragments) >= FRAGMENT_MAX:
            raise ProtocolError(
                "count_out_of_range",
                f"a session holds at most {FRAGMENT_MAX} fragments",
                "fragments",
            )
        self.fragments.append(fragment)
        return self

    def begin_ghosting(self) -> "ColliderSession":
        """Leave draft: enforce the 3..5 count bound, then the diversity
        pre-flight. A homogeneous set is recorded as a terminal abort, not
        raised — the session itself is the report."""
        self._require(ColliderStatus.DRAFT)
        n = len(self.fragments)
        if not FRAGMENT_MIN <= n <= FRAGMENT_MAX:
            raise ProtocolError(
                "count_out_of_range",
                f"need {FRAGMENT_MIN}..{FRAGMENT_MAX} fragments, have {n}",
                "fragments",
            )
        check = preflight_diversity(self.fragments)
        if not check.ok:
            self.abort_reason = check.reason
            self._stamp(ColliderStatus.ABORTED_PREFLIGHT)
            return self
        self._stamp(ColliderStatus.GHOSTING)
        return self

    # --- step 2: ghost extraction -----------------------------------------

    def attach_ghost(
        self, fragment_id: str, ghost: Ghost, config: Config = DEFAULT_CONFIG
    ) -> "ColliderSession":
        self._require(ColliderStatus.GHOSTING)
        fragment = self.fragment_by_id(fragment_id)
        if ghost.fragment_id != fragment_id:
            raise ProtocolError(
                "fragment_mismatch",
                f"ghost names fragment {ghost.fragment_id!r}, expected {fragment_id!r}",
                "ghost.fragment_id",
            )
        if self.ghost_for(fragment_id) is not None:
            raise ProtocolError(
                "duplicate_ghost", f"fragment {fragment_id!r} already has a ghost", "fragment_id"
            )
        if not ghost.structural_description.strip():
            raise ProtocolError(
                "empty_field",
                "ghost structural_description must be non-empty",
                "ghost.structural_description",
            )
        if not ghost.checklist.all_true():
            failing = ", ".join(ghost.checklist.failing())
            raise ProtocolError(
                "checklist_incomplete",
                f"ghost rejected; unchecked criteria: {failing}",
                "ghost.checklist",
            )
        ghost.shallow_warning = shallow_ghost_warning(
            fragment, ghost.structural_description, config
        )
        if ghost.shallow_warning == "warn":
            self.warnings.append(
                f"shallow ghost suspected for fragment {fragment_id}: "
                "description largely restates the fragment wording"
            )
        self.ghosts.append(ghost)
        if len(self.ghosts) == len(self.fragments):
            self._stamp(ColliderStatus.COLLIDING)
        return self

    # --- step 3: collision matrix ------------------------------------------

    def all_pairs(self) -> list[tuple[str, str]]:
        ids = sorted(f.id for f in self.fragments)
        return [(ids[i], ids[j]) for i in range(len(ids)) for j in range(i + 1, len(ids))]

    def enumerate_pairs(self) -> list[tuple[str, str]]:
        self._require(ColliderStatus.COLLIDING)
        return self.all_pairs()

    def pending_pairs(self) -> list[tuple[str, str]]:
        scored = {c.pair for c in self.collisions}
        return [p for p in self.all_pairs() if p not in scored]

    def score_collision(
        self,
        pair: tuple[str, str],
        score: CollisionScore,
        rationale: str = "",
        config: Config = DEFAULT_CONFIG,
    ) -> "ColliderSession":
        self._require(ColliderStatus.COLLIDING)
        a, b = pair
        if a == b:
            raise ProtocolError("unknown_pair", "a pair needs two distinct fragments", "pair")
        norm = normalize_pair(a, b)
        if norm not in self.all_pairs():
            raise ProtocolError("unknown_pair", f"{norm} is not a fragment pair here", "pair")
        if any(c.pair == norm for c in self.collisions):
            raise ProtocolError("duplicate_pair", f"pair {norm} already scored", "pair")
        if score is CollisionScore.ELECTRIC and not rationale.strip():
            raise ProtocolError(
                "missing_rationale",
                "an electric score requires a rationale",
                "rationale",
            )
        self.collisions.append(Collision(pair=norm, score=score, rationale=rationale))
        if not self.pending_pairs():
            self.collision_gate(config)
        return self

    def electric_ids(self) -> list[str]:
        return [c.id for c in self.collisions if c.score is CollisionScore.ELECTRIC]

    def collision_gate(self, config: Config = DEFAULT_CONFIG) -> GateOutcome:
        """Decide the matrix outcome once every pair is scored.

        Idempotent: after the gate has run, returns the recorded outcome.
        """
        if self.gate is not None and self.status is not ColliderStatus.COLLIDING:
            return self.gate
        self._require(ColliderStatus.COLLIDING)
        pending = self.pending_pairs()
        if pending:
            raise ProtocolError(
                "incomplete_matrix",
                f"{len(pending)} pair(s) still unscored",
                "collisions",
            )
        electric = self.electric_ids()
        total = len(self.collisions)
        if not electric:
            self.gate = GateOutcome(kind="abort_no_electric")
            self.abort_reason = "no electric collisions found"
            self._stamp(ColliderStatus.ABORTED_NO_ELECTRIC)
            return self.gate
        inflation = len(electric) == total and total >= 3
        high_rate = not inflation and total > 0 and len(electric) / total > config.high_electric_rate
        self.gate = GateOutcome(
            kind="advance",
            electric=electric,
            electric_inflation=inflation,
            high_electric_rate=high_rate,
        )
        if inflation:
            self.warnings.append(
                "electric inflation: every collision scored electric — "
                "if it can be explained in two seconds it is interesting at best"
            )
        elif high_rate:
            self.warnings.append(
                f"high electric rate: {len(electric)}/{total} pairs scored electric"
            )
        self._stamp(ColliderStatus.CRYSTALLIZING)
        return self.gate

    # --- step 4: vision crystallization -------------------------------------

    def crystallize_vision(self, collision_id: str, vision: Vision) -> bool:
        """Store the vision and return whether it advances (min rating >= 3).

        Non-advancing visions are kept for audit; they are simply not
        eligible for a bridge.
        """
        self._require(ColliderStatus.CRYSTALLIZING)
        collision = self.collision_by_id(collision_id)
        if collision is None:
            raise ProtocolError(
                "unknown_pair", f"no collision with id {collision_id!r}", "collision_id"
            )
        if collision.score is not CollisionScore.ELECTRIC:
            raise ProtocolError(
                "not_electric",
                f"collision {collision_id} scored {collision.score.value}; "
                "only electric collisions crystallize",
                "collision_id",
            )
        if vision.collision_id != collision_id:
            raise ProtocolError(
                "collision_mismatch",
                f"vision names collision {vision.collision_id!r}, expected {collision_id!r}",
                "vision.collision_id",
            )
        if self.vision_by_id(vision.id) is not None:
            raise ProtocolError(
                "duplicate_vision", f"vision id {vision.id!r} already present", "vision.id"
            )
        vision.validate()
        self.visions.append(vision)
        return vision.advances

    # --- step 5: reality bridge ---------------------------------------------

    def attach_bridge(self, vision_id: str, bridge: RealityBridge) -> "ColliderSession":
        self._require(ColliderStatus.CRYSTALLIZING, ColliderStatus.BRIDGING)
        vision = self.vision_by_id(vision_id)
        if vision is None:
            raise ProtocolError("unknown_vision", f"no vision with id {vision_id!r}", "vision_id")
        if not vision.advances:
            raise ProtocolError(
                "vision_not_advancing",
                f"vision {vision_id} has a rating below 3 and cannot be bridged",
                "vision_id",
            )
        if bridge.vision_id != vision_id:
            raise ProtocolError(
                "vision_mismatch",
                f"bridge names vision {bridge.vision_id!r}, expected {vision_id!r}",
                "bridge.vision_id",
            )
        if any(b.vision_id == vision_id for b in self.bridges):
            raise ProtocolError(
                "duplicate_bridge", f"vision {vision_id} already has a bridge", "vision_id"
            )
        bridge.validate()
        self.bridges.append(bridge)
        if self.status is ColliderStatus.CRYSTALLIZING:
            self._stamp(ColliderStatus.BRIDGING)
        return self

    def complete(self) -> "ColliderSession":
        self._require(ColliderStatus.BRIDGING)
        bridged = {b.vision_id for b in self.bridges}
        if not any(v.id in bridged and v.advances for v in self.visions):
            raise ProtocolError(
                "no_bridged_vision",
                "completion requires at least one advancing vision with a bridge",
            )
        self._stamp(ColliderStatus.COMPLETED)
        return self


def create_session(
    theme: str,
    fragments: list[Fragment],
    id: str = "session",
    config: Config = DEFAULT_CONFIG,
) -> ColliderSession:
    """Open a session directly from a full fragment list.

    Count violations raise; a homogeneous list yields a session recorded
    in the aborted_preflight terminal state.
    """
    del config  # gate thresholds not needed at creation; kept for symmetry
    session = ColliderSession.draft(theme, id)
    n = len(fragments)
    if not FRAGMENT_MIN <= n <= FRAGMENT_MAX:
        raise ProtocolError(
            "count_out_of_range",
            f"need {FRAGMENT_MIN}..{FRAGMENT_MAX} fragments, have {n}",
            "fragments",
        )
    for fragment in fragments:
        session.add_fragment(fragment)
    return session.begin_ghosting()
