"""Wire/ledger representation of sessions and step payloads.

``*_to_payload`` and ``*_from_payload`` are exact inverses: the payload a
session serializes to reconstructs an equal session, which is what makes
ledger snapshots replayable and the data export round-trippable.

``parse_*`` functions turn untrusted request dicts (HTTP bodies, CLI
JSON arguments, fixtures) into domain objects, reporting the precise
dotted path of the first offending field. Enum values accept kebab-case
aliases ("fast-follower") since those read better on a command line.
"""

from __future__ import annotations

from enum import Enum
from typing import Any, Type, TypeVar

from . import collider as gc
from . import precog as pc
from .errors import ProtocolError
from .integration import IntegrationRun, VisionMapping

E = TypeVar("E", bound=Enum)


def parse_enum(enum_cls: Type[E], value: Any, path: str) -> E:
    if isinstance(value, enum_cls):
        return value
    if isinstance(value, str):
        try:
            return enum_cls(value.strip().casefold().replace("-", "_").replace(" ", "_"))
        except ValueError:
            pass
    allowed = ", ".join(m.value for m in enum_cls)
    raise ProtocolError(
        "invalid_value", f"expected one of: {allowed}; got {value!r}", path
    )


def _require(body: dict, key: str, path: str) -> Any:
    if key not in body or body[key] is None:
        raise ProtocolError("missing_field", f"required field {key!r} is missing", f"{path}.{key}")
    return body[key]


def _str(body: dict, key: str, path: str, default: str | None = None) -> str:
    if default is not None and key not in body:
        return default
    value = _require(body, key, path)
    if not isinstance(value, str):
        raise ProtocolError("invalid_value", f"{key} must be a string", f"{path}.{key}")
    return value


def _int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ProtocolError("rating_out_of_range", f"expected an integer, got {value!r}", path)
    return value


# --- fragments / ghosts / collisions / visions / bridges -----------------------


def parse_fragment(body: dict, path: str = "fragment") -> gc.Fragment:
    confidence = body.get("confidence")
    fragment = gc.Fragment(
        id=_str(body, "id", path),
        text=_str(body, "text", path),
        domain_tag=_str(body, "domain_tag", path),
        source_kind=parse_enum(gc.SourceKind, _require(body, "source_kind", path), f"{path}.source_kind"),
        confidence=None if confidence is None else parse_enum(gc.Confidence, confidence, f"{path}.confidence"),
    )
    fragment.validate(path)
    return fragment


def fragment_to_payload(fragment: gc.Fragment) -> dict:
    return {
        "id": fragment.id,
        "text": fragment.text,
        "domain_tag": fragment.domain_tag,
        "source_kind": fragment.source_kind.value,
        "confidence": fragment.confidence.value if fragment.confidence else None,
    }


def parse_ghost(body: dict, path: str = "ghost") -> gc.Ghost:
    checklist_raw = _require(body, "checklist", path)
    if not isinstance(checklist_raw, dict):
        raise ProtocolError("invalid_value", "checklist must be an object", f"{path}.checklist")
    checklist = gc.GhostChecklist(
        uses_verbs=bool(checklist_raw.get("uses_verbs", False)),
        includes_emotion=bool(checklist_raw.get("includes_emotion", False)),
        cross_domain_comprehensible=bool(checklist_raw.get("cross_domain_comprehensible", False)),
        reversibility_pass=bool(checklist_raw.get("reversibility_pass", False)),
    )
    return gc.Ghost(
        fragment_id=_str(body, "fragment_id", path),
        structural_description=_str(body, "structural_description", path),
        checklist=checklist,
        shallow_warning=body.get("shallow_warning", "none"),
    )


def ghost_to_payload(ghost: gc.Ghost) -> dict:
    return {
        "fragment_id": ghost.fragment_id,
        "structural_description": ghost.structural_description,
        "checklist": {
            "uses_verbs": ghost.checklist.uses_verbs,
            "includes_emotion": ghost.checklist.includes_emotion,
            "cross_domain_comprehensible": ghost.checklist.cross_domain_comprehensible,
            "reversibility_pass": ghost.checklist.reversibility_pass,
        },
        "shallow_warning": ghost.shallow_warning,
    }


def parse_ratings(body: Any, path: str = "ratings") -> gc.VisionRatings:
    if isinstance(body, (list, tuple)) and len(body) == 4:
        body = dict(zip(("novelty", "feasibility", "resonance", "timing"), body))
    if not isinstance(body, dict):
        raise ProtocolError(
            "invalid_value", "ratings must be an object or 4-element list", path
        )
    ratings = gc.VisionRatings(
        novelty=_int(_require(body, "novelty", path), f"{path}.novelty"),
        feasibility=_int(_require(body, "feasibility", path), f"{path}.feasibility"),
        resonance=_int(_require(body, "resonance", path), f"{path}.resonance"),
        timing=_int(_require(body, "timing", path), f"{path}.timing"),
    )
    ratings.validate(path)
    return ratings


def parse_vision(body: dict, default_id: str, path: str = "vision") -> gc.Vision:
    vision = gc.Vision(
        id=_str(body, "id", path, default=default_id),
        collision_id=_str(body, "collision_id", path),
        name=_str(body, "name", path),
        one_line=_str(body, "one_line", path),
        emotion=_str(body, "emotion", path),
        cinematic_image=_str(body, "cinematic_image", path),
        why_now=_str(body, "why_now", path),
        ratings=parse_ratings(_require(body, "ratings", path), "ratings"),
    )
    vision.validate(path)
    return vision


def vision_to_payload(vision: gc.Vision) -> dict:
    return {
        "id": vision.id,
        "collision_id": vision.collision_id,
        "name": vision.name,
        "one_line": vision.one_line,
        "emotion": vision.emotion,
        "cinematic_image": vision.cinematic_image,
        "why_now": vision.why_now,
        "ratings": {
            "novelty": vision.ratings.novelty,
            "feasibility": vision.ratings.feasibility,
            "resonance": vision.ratings.resonance,
            "timing": vision.ratings.timing,
        },
        "advances": vision.advances,
    }


def parse_bridge(body: dict, path: str = "bridge") -> gc.RealityBridge:
    capabilities = body.get("existing_capabilities", [])
    kills = _require(body, "kill_conditions", path)
    if not isinstance(kills, list):
        raise ProtocolError(
            "invalid_value", "kill_conditions must be a list", f"{path}.kill_conditions"
        )
    bridge = gc.RealityBridge(
        vision_id=_str(body, "vision_id", path),
        mvv=_str(body, "mvv", path),
        existing_capabilities=[str(c) for c in capabilities],
        kill_conditions=[str(k) for k in kills],
        first_step_24h=_str(body, "first_step_24h", path),
    )
    bridge.validate(path)
    return bridge


def bridge_to_payload(bridge: gc.RealityBridge) -> dict:
    return {
        "vision_id": bridge.vision_id,
        "mvv": bridge.mvv,
        "existing_capabilities": list(bridge.existing_capabilities),
        "kill_conditions": list(bridge.kill_conditions),
        "first_step_24h": bridge.first_step_24h,
    }


# --- signals / convergences / contrarian / grid / actions ------------------------


def parse_signal(body: dict, path: str = "signal") -> pc.Signal:
    evidence_raw = _require(body, "evidence", path)
    if not isinstance(evidence_raw, list):
        raise ProtocolError("invalid_value", "evidence must be a list", f"{path}.evidence")
    evidence = [
        pc.Evidence(
            claim=_str(item, "claim", f"{path}.evidence.{i}"),
            source=_str(item, "source", f"{path}.evidence.{i}"),
        )
        for i, item in enumerate(evidence_raw)
    ]
    if "confidence" not in body or body["confidence"] is None:
        raise ProtocolError(
            "missing_confidence",
            "every signal carries a confidence tag",
            f"{path}.confidence",
        )
    signal = pc.Signal(
        key=_str(body, "key", path),
        description=_str(body, "description", path),
        evidence=evidence,
        strength=parse_enum(pc.SignalStrength, _require(body, "strength", path), f"{path}.strength"),
        direction=parse_enum(pc.SignalDirection, _require(body, "direction", path), f"{path}.direction"),
        confidence=parse_enum(gc.Confidence, body["confidence"], f"{path}.confidence"),
        source_kind=parse_enum(pc.SignalSource, _require(body, "source_kind", path), f"{path}.source_kind"),
    )
    signal.validate(path)
    return signal


def signal_to_payload(signal: pc.Signal) -> dict:
    return {
        "key": signal.key,
        "description": signal.description,
        "evidence": [{"claim": e.claim, "source": e.source} for e in signal.evidence],
        "strength": signal.strength.value,
        "direction": signal.direction.value,
        "confidence": signal.confidence.value,
        "source_kind": signal.source_kind.value,
    }


def parse_convergence(body: dict, default_id: str, path: str = "convergence") -> pc.ConvergencePoint:
    keys = _require(body, "signal_keys", path)
    if not isinstance(keys, list):
        raise ProtocolError("invalid_value", "signal_keys must be a list", f"{path}.signal_keys")
    convergence = pc.ConvergencePoint(
        id=_str(body, "id", path, default=default_id),
        signal_keys=[str(k) for k in keys],
        hypothesis=_str(body, "hypothesis", path),
        causal_logic=_str(body, "causal_logic", path),
        confidence=parse_enum(
            pc.ConvergenceConfidence, _require(body, "confidence", path), f"{path}.confidence"
        ),
        confidence_rationale=_str(body, "confidence_rationale", path),
    )
    convergence.validate(path)
    return convergence


def convergence_to_payload(convergence: pc.ConvergencePoint) -> dict:
    return {
        "id": convergence.id,
        "signal_keys": list(convergence.signal_keys),
        "hypothesis": convergence.hypothesis,
        "causal_logic": convergence.causal_logic,
        "confidence": convergence.confidence.value,
        "confidence_rationale": convergence.confidence_rationale,
    }


def parse_contrarian(body: dict, path: str = "contrarian") -> pc.ContrarianView:
    scenarios_raw = _require(body, "scenarios", path)
    if not isinstance(scenarios_raw, list):
        raise ProtocolError("invalid_value", "scenarios must be a list", f"{path}.scenarios")
    scenarios = []
    for i, item in enumerate(scenarios_raw):
        spath = f"{path}.scenarios.{i}"
        preconditions = _require(item, "preconditions", spath)
        if not isinstance(preconditions, list):
            raise ProtocolError(
                "invalid_value", "preconditions must be a list", f"{spath}.preconditions"
            )
        try:
            low = float(_require(item, "probability_low", spath))
            high = float(_require(item, "probability_high", spath))
        except (TypeError, ValueError):
            raise ProtocolError(
                "bad_probability", "probabilities must be numbers", f"{spath}.probability_low"
            )
        scenarios.append(
            pc.ContrarianScenario(
                description=_str(item, "description", spath),
                historical_analogy=_str(item, "historical_analogy", spath),
                preconditions=[str(p) for p in preconditions],
                collapse_trigger=_str(item, "collapse_trigger", spath),
                probability_low=low,
                probability_high=high,
            )
        )
    view = pc.ContrarianView(
        overestimation_reason=_str(body, "overestimation_reason", path),
        scenarios=scenarios,
    )
    view.validate(path)
    return view


def contrarian_to_payload(view: pc.ContrarianView | None) -> dict | None:
    if view is None:
        return None
    return {
        "overestimation_reason": view.overestimation_reason,
        "scenarios": [
            {
                "description": s.description,
                "historical_analogy": s.historical_analogy,
                "preconditions": list(s.preconditions),
                "collapse_trigger": s.collapse_trigger,
                "probability_low": s.probability_low,
                "probability_high": s.probability_high,
            }
            for s in view.scenarios
        ],
    }


def parse_grid(body: dict, path: str = "grid") -> pc.TimingGrid:
    return pc.TimingGrid(
        market_phase=parse_enum(pc.MarketPhase, _require(body, "market_phase", path), f"{path}.market_phase"),
        competitive=parse_enum(
            pc.CompetitivePosition, _require(body, "competitive", path), f"{path}.competitive"
        ),
        readiness=parse_enum(pc.Readiness, _require(body, "readiness", path), f"{path}.readiness"),
        external_window=parse_enum(
            pc.ExternalWindow, _require(body, "external_window", path), f"{path}.external_window"
        ),
        annotation=body.get("annotation", ""),
    )


def grid_to_payload(grid: pc.TimingGrid) -> dict:
    return {
        "market_phase": grid.market_phase.value,
        "competitive": grid.competitive.value,
        "readiness": grid.readiness.value,
        "external_window": grid.external_window.value,
        "annotation": grid.annotation,
    }


def judgment_to_payload(judgment: pc.TimingJudgment) -> dict:
    return {
        "overall": judgment.overall.value,
        "polarity_sum": judgment.polarity_sum,
        "escalated_contrarian_required": judgment.escalated_contrarian_required,
    }


def parse_action(body: dict, default_id: str, path: str = "action") -> pc.ActionItem:
    action = pc.ActionItem(
        id=_str(body, "id", path, default=default_id),
        category=parse_enum(pc.ActionCategory, _require(body, "category", path), f"{path}.category"),
        action=_str(body, "action", path),
        trigger=_str(body, "trigger", path),
        cost_estimate=_str(body, "cost_estimate", path),
    )
    action.validate(path)
    return action


def action_to_payload(action: pc.ActionItem) -> dict:
    return {
        "id": action.id,
        "category": action.category.value,
        "action": action.action,
        "trigger": action.trigger,
        "cost_estimate": action.cost_estimate,
    }


# --- whole sessions ---------------------------------------------------------------


def collider_to_payload(session: gc.ColliderSession) -> dict:
    gate = session.gate
    return {
        "protocol": "ghosty",
        "id": session.id,
        "theme": session.theme,
        "status": session.status.value,
        "revision": session.revision,
        "fragments": [fragment_to_payload(f) for f in session.fragments],
        "ghosts": [ghost_to_payload(g) for g in session.ghosts],
        "collisions": [
            {"pair": list(c.pair), "score": c.score.value, "rationale": c.rationale}
            for c in session.collisions
        ],
        "gate": None
        if gate is None
        else {
            "kind": gate.kind,
            "electric": list(gate.electric),
            "electric_inflation": gate.electric_inflation,
            "high_electric_rate": gate.high_electric_rate,
        },
        "visions": [vision_to_payload(v) for v in session.visions],
        "bridges": [bridge_to_payload(b) for b in session.bridges],
        "step_timestamps": dict(session.step_timestamps),
        "warnings": list(session.warnings),
        "abort_reason": session.abort_reason,
    }


def collider_from_payload(payload: dict) -> gc.ColliderSession:
    session = gc.ColliderSession(
        id=payload["id"],
        theme=payload["theme"],
        status=gc.ColliderStatus(payload["status"]),
        revision=payload.get("revision", 0),
        step_timestamps=dict(payload.get("step_timestamps", {})),
        warnings=list(payload.get("warnings", [])),
        abort_reason=payload.get("abort_reason"),
    )
    session.fragments = [parse_fragment(f, "fragment") for f in payload.get("fragments", [])]
    session.ghosts = [parse_ghost(g, "ghost") for g in payload.get("ghosts", [])]
    session.collisions = [
        gc.Collision(
            pair=tuple(c["pair"]),
            score=gc.CollisionScore(c["score"]),
            rationale=c.get("rationale", ""),
        )
        for c in payload.get("collisions", [])
    ]
    gate = payload.get("gate")
    if gate is not None:
        session.gate = gc.GateOutcome(
            kind=gate["kind"],
            electric=list(gate.get("electric", [])),
            electric_inflation=gate.get("electric_inflation", False),
            high_electric_rate=gate.get("high_electric_rate", False),
        )
    session.visions = [parse_vision(v, v["id"], "vision") for v in payload.get("visions", [])]
    session.bridges = [parse_bridge(b, "bridge") for b in payload.get("bridges", [])]
    return session


def precog_to_payload(session: pc.PrecogSession) -> dict:
    return {
        "protocol": "precog",
        "id": session.id,
        "theme_key": session.theme_key,
        "horizon": session.horizon,
        "status": session.status.value,
        "revision": session.revision,
        "signals": [signal_to_payload(s) for s in session.signals],
        "convergences": [convergence_to_payload(c) for c in session.convergences],
        "contrarian": contrarian_to_payload(session.contrarian),
        "grid_evaluations": [
            {
                "label": e.label,
                "grid": grid_to_payload(e.grid),
                "judgment": judgment_to_payload(e.judgment),
            }
            for e in session.grid_evaluations
        ],
        "actions": [action_to_payload(a) for a in session.actions],
        "step_timestamps": dict(session.step_timestamps),
        "warnings": list(session.warnings),
    }


def precog_from_payload(payload: dict) -> pc.PrecogSession:
    session = pc.PrecogSession(
        id=payload["id"],
        theme_key=payload["theme_key"],
        horizon=payload.get("horizon", "unspecified"),
        status=pc.PrecogStatus(payload["status"]),
        revision=payload.get("revision", 0),
        step_timestamps=dict(payload.get("step_timestamps", {})),
        warnings=list(payload.get("warnings", [])),
    )
    session.signals = [parse_signal(s, "signal") for s in payload.get("signals", [])]
    session.convergences = [
        parse_convergence(c, c["id"], "convergence") for c in payload.get("convergences", [])
    ]
    contrarian = payload.get("contrarian")
    if contrarian is not None:
        session.contrarian = parse_contrarian(contrarian, "contrarian")
    for entry in payload.get("grid_evaluations", []):
        judgment = entry["judgment"]
        session.grid_evaluations.append(
            pc.GridEvaluation(
                label=entry["label"],
                grid=parse_grid(entry["grid"], "grid"),
                judgment=pc.TimingJudgment(
                    overall=pc.TimingCall(judgment["overall"]),
                    polarity_sum=judgment["polarity_sum"],
                    escalated_contrarian_required=judgment["escalated_contrarian_required"],
                ),
            )
        )
    session.actions = [parse_action(a, a["id"], "action") for a in payload.get("actions", [])]
    return session


def session_to_payload(session) -> dict:
    if isinstance(session, gc.ColliderSession):
        return collider_to_payload(session)
    if isinstance(session, pc.PrecogSession):
        return precog_to_payload(session)
    raise TypeError(f"not a session: {type(session)!r}")


def session_from_payload(payload: dict):
    protocol = payload.get("protocol")
    if protocol == "ghosty":
        return collider_from_payload(payload)
    if protocol == "precog":
        return precog_from_payload(payload)
    raise ProtocolError("invalid_value", f"unknown session protocol {protocol!r}", "protocol")


def integration_to_payload(run: IntegrationRun) -> dict:
    return {
        "protocol": "integration",
        "id": run.id,
        "precog_session_id": run.precog_session_id,
        "selected_convergences": list(run.selected_convergences),
        "external_fragments": [fragment_to_payload(f) for f in run.external_fragments],
        "collider_session_id": run.collider_session_id,
        "mappings": [
            {
                "vision_id": m.vision_id,
                "grid_label": m.grid_label,
                "action_ids": list(m.action_ids),
            }
            for m in run.mappings
        ],
    }


def integration_from_payload(payload: dict) -> IntegrationRun:
    return IntegrationRun(
        id=payload["id"],
        precog_session_id=payload["precog_session_id"],
        selected_convergences=list(payload["selected_convergences"]),
        external_fragments=[
            parse_fragment(f, "external") for f in payload.get("external_fragments", [])
        ],
        collider_session_id=payload.get("collider_session_id"),
        mappings=[
            VisionMapping(
                vision_id=m["vision_id"],
                grid_label=m["grid_label"],
                action_ids=list(m.get("action_ids", [])),
            )
            for m in payload.get("mappings", [])
        ],
    )
