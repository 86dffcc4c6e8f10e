"""Bidirectional bridge between the foresight and collision protocols.

Forward direction: convergence points from a foresight session become
collision fragments (2-3 convergences plus 1-2 external-domain fragments,
so the downstream 3..5 fragment bound holds by construction). Evidence
confidence carries forward as the minimum across contributing signals —
a chain is as reliable as its weakest link.

Backward direction: a crystallized vision's feasibility rating suggests
the organizational-readiness axis, and its reality bridge expands into
action items (the 24-hour first step becomes one "now" item, each kill
condition one "kill" item).

The choice of WHICH convergences to select stays with the operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .collider import (
    ColliderSession,
    Confidence,
    CONFIDENCE_RANK,
    Fragment,
    RealityBridge,
    SourceKind,
    Vision,
)
from .config import Config, DEFAULT_CONFIG
from .errors import ProtocolError
from .precog import ActionCategory, ActionItem, PrecogSession, PrecogStatus, Readiness

SELECT_MIN, SELECT_MAX = 2, 3
EXTERNAL_MIN, EXTERNAL_MAX = 1, 2

# Convergence selection requires the analysis to be locked: once the
# session has left the contrarian phase, signals and convergences can no
# longer change. Requiring full completion instead would make the
# round-trip impossible (vision-labeled grid rows belong to the same
# session's timing phase).
_SELECTABLE = {PrecogStatus.TIMING, PrecogStatus.ACTING, PrecogStatus.COMPLETED}


@dataclass
class VisionMapping:
    vision_id: str
    grid_label: str
    action_ids: list[str] = field(default_factory=list)


@dataclass
class IntegrationRun:
    """Record linking one foresight session to one collision session."""

    id: str
    precog_session_id: str
    selected_convergences: list[str]
    external_fragments: list[Fragment]
    collider_session_id: str | None = None
    mappings: list[VisionMapping] = field(default_factory=list)

    def validate(self) -> None:
        if not SELECT_MIN <= len(self.selected_convergences) <= SELECT_MAX:
            raise ProtocolError(
                "selection_out_of_bounds",
                f"select {SELECT_MIN}..{SELECT_MAX} convergences, "
                f"got {len(self.selected_convergences)}",
                "selected_convergences",
            )
        if not EXTERNAL_MIN <= len(self.external_fragments) <= EXTERNAL_MAX:
            raise ProtocolError(
                "selection_out_of_bounds",
                f"supply {EXTERNAL_MIN}..{EXTERNAL_MAX} external fragments, "
                f"got {len(self.external_fragments)}",
                "external_fragments",
            )


def minimum_confidence(values: list[Confidence]) -> Confidence:
    return min(values, key=lambda c: CONFIDENCE_RANK[c])


def convergences_to_fragments(
    precog_session: PrecogSession,
    selection: list[str],
    externals: list[Fragment],
) -> list[Fragment]:
    """Turn selected convergence points into collision fragments.

    Fragment text is the hypothesis plus the causal logic; the domain tag
    is the session's theme key; confidence is the weakest confidence among
    the contributing signals.
    """
    if precog_session.status not in _SELECTABLE:
        raise ProtocolError(
            "unfinalized_session",
            "convergence analysis is not locked until the contrarian phase is complete "
            f"(session is {precog_session.status.value})",
        )
    if not SELECT_MIN <= len(selection) <= SELECT_MAX:
        raise ProtocolError(
            "selection_out_of_bounds",
            f"select {SELECT_MIN}..{SELECT_MAX} convergences, got {len(selection)}",
            "selection",
        )
    if not EXTERNAL_MIN <= len(externals) <= EXTERNAL_MAX:
        raise ProtocolError(
            "selection_out_of_bounds",
            f"supply {EXTERNAL_MIN}..{EXTERNAL_MAX} external fragments, got {len(externals)}",
            "externals",
        )
    fragments: list[Fragment] = []
    for i, cid in enumerate(selection):
        convergence = precog_session.convergence_by_id(cid)
        if convergence is None:
            raise ProtocolError(
                "unknown_convergence",
                f"no convergence with id {cid!r}",
                f"selection.{i}",
            )
        confidences = [
            precog_session.signal_by_key(key).confidence for key in convergence.signal_keys
        ]
        fragments.append(
            Fragment(
                id=cid,
                text=f"{convergence.hypothesis} {convergence.causal_logic}".strip(),
                domain_tag=precog_session.theme_key,
                source_kind=SourceKind.OBSERVATION,
                confidence=minimum_confidence(confidences),
            )
        )
    for fragment in externals:
        fragment.validate("external")
        if any(f.id == fragment.id for f in fragments):
            raise ProtocolError(
                "duplicate_fragment",
                f"external fragment id {fragment.id!r} clashes with a convergence id",
                "externals",
            )
        fragments.append(fragment)
    return fragments


def vision_to_readiness(vision: Vision, config: Config = DEFAULT_CONFIG) -> Readiness:
    """Suggest the readiness axis from the vision's feasibility rating."""
    feasibility = vision.ratings.feasibility
    if feasibility >= config.readiness_ready_min:
        return Readiness.READY
    if feasibility >= config.readiness_partial_min:
        return Readiness.PARTIALLY_READY
    return Readiness.NOT_READY


def bridge_to_actions(
    vision: Vision, bridge: RealityBridge, id_prefix: str = "a"
) -> list[ActionItem]:
    """Expand a reality bridge into action items.

    Exactly one "now" item from the 24-hour first step, plus one "kill"
    item per kill condition.
    """
    if not vision.advances:
        raise ProtocolError(
            "vision_not_advancing",
            f"vision {vision.id} has a rating below 3 and maps to no actions",
            "vision",
        )
    if bridge.vision_id != vision.id:
        raise ProtocolError(
            "vision_mismatch",
            f"bridge belongs to vision {bridge.vision_id!r}, not {vision.id!r}",
            "bridge.vision_id",
        )
    bridge.validate()
    items = [
        ActionItem(
            id=f"{id_prefix}1",
            category=ActionCategory.NOW,
            action=bridge.first_step_24h,
            trigger="immediate",
            cost_estimate=bridge.mvv,
        )
    ]
    for i, condition in enumerate(bridge.kill_conditions, start=2):
        items.append(
            ActionItem(
                id=f"{id_prefix}{i}",
                category=ActionCategory.KILL,
                action=f"stop pursuit of {vision.name}",
                trigger=condition,
                cost_estimate="disinvestment only",
            )
        )
    return items


def derive_collider_session(
    precog_session: PrecogSession,
    selection: list[str],
    externals: list[Fragment],
    theme: str,
    session_id: str,
    run_id: str | None = None,
) -> tuple[ColliderSession, IntegrationRun]:
    """Open a collision session seeded from a foresight session.

    Returns the new draft session (fragments added, gate not yet run)
    together with the integration record linking the two.
    """
    fragments = convergences_to_fragments(precog_session, selection, externals)
    session = ColliderSession.draft(theme, session_id)
    for fragment in fragments:
        session.add_fragment(fragment)
    run = IntegrationRun(
        id=run_id or f"int-{session_id}",
        precog_session_id=precog_session.id,
        selected_convergences=list(selection),
        external_fragments=list(externals),
        collider_session_id=session_id,
    )
    run.validate()
    return session, run
