"""Session engine shared by the CLI and the HTTP API.

Both interfaces funnel every mutation through :class:`Engine`, so one
logical step sequence produces the same ledger bytes regardless of the
surface it came through.

State model: the engine itself is stateless between calls apart from the
append-only store. Every mutation loads the latest snapshot of the
session, applies one gated operation, bumps the revision and appends a
new snapshot record (record id ``<session_id>:<revision>``); restarting
the process and replaying the store reconstructs identical views.
Mutations on one session are serialized by a per-session lock.
"""

from __future__ import annotations

import threading
from collections import defaultdict

from . import collider as gc
from . import precog as pc
from . import serialize as ser
from .config import Config, DEFAULT_CONFIG
from .errors import ProtocolError
from .integration import derive_collider_session
from .ledger import (
    Protocol,
    PredictionOutcome,
    PredictionRecord,
    Store,
    diff_signals,
    evaluate_prediction,
    load_predictions,
    make_record,
    prediction_summary,
    record_prediction,
    score_rubric,
)

GHOSTY_STEPS = {"fragment", "advance", "ghost", "collision", "vision", "bridge", "complete"}
PRECOG_STEPS = {"signal", "advance", "convergence", "contrarian", "grid", "action", "finalize"}


class Engine:
    def __init__(self, store: Store, config: Config = DEFAULT_CONFIG):
        self.store = store
        self.config = config
        self._locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._guard = threading.Lock()

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._guard:
            return self._locks[session_id]

    # --- session loading -------------------------------------------------------

    def load_session(self, session_id: str):
        payload = self.store.latest_payload(session_id)
        if payload is None:
            raise ProtocolError("unknown_session", f"no session with id {session_id!r}")
        return ser.session_from_payload(payload)

    def get_session(self, session_id: str) -> dict:
        payload = self.store.latest_payload(session_id)
        if payload is None:
            raise ProtocolError("unknown_session", f"no session with id {session_id!r}")
        return payload

    def _snapshot(self, session) -> dict:
        session.revision += 1
        payload = ser.session_to_payload(session)
        theme = payload.get("theme_key") or payload.get("theme")
        protocol = payload["protocol"]
        record = make_record(
            protocol, theme, payload, f"{session.id}:{session.revision:04d}"
        )
        self.store.append(record)
        return payload

    # --- session creation --------------------------------------------------------

    def create_session(self, body: dict) -> dict:
        protocol = ser.parse_enum(Protocol, body.get("protocol"), "protocol")
        session_id = body.get("id") or self._fresh_session_id(protocol.value)
        if self.store.latest_payload(session_id) is not None:
            raise ProtocolError(
                "duplicate_session", f"session id {session_id!r} already exists", "id"
            )
        with self._lock_for(session_id):
            if protocol is Protocol.PRECOG:
                theme_key = body.get("theme_key") or body.get("theme")
                if not theme_key:
                    raise ProtocolError("missing_field", "theme_key is required", "theme_key")
                session = pc.PrecogSession.new(
                    theme_key, session_id, body.get("horizon", "unspecified")
                )
                return self._snapshot(session)
            if protocol is Protocol.INTEGRATION:
                raise ProtocolError(
                    "invalid_value",
                    "integration records are created via a ghosty session with an "
                    "integration block",
                    "protocol",
                )
            theme = body.get("theme")
            if not theme:
                raise ProtocolError("missing_field", "theme is required", "theme")
            integration = body.get("integration")
            if integration is not None:
                session = self._create_from_integration(session_id, theme, integration)
            else:
                session = gc.ColliderSession.draft(theme, session_id)
                for i, raw in enumerate(body.get("fragments", [])):
                    session.add_fragment(ser.parse_fragment(raw, f"fragments.{i}"))
            return self._snapshot(session)

    def _create_from_integration(
        self, session_id: str, theme: str, block: dict
    ) -> gc.ColliderSession:
        precog_id = block.get("precog_session_id")
        if not precog_id:
            raise ProtocolError(
                "missing_field",
                "integration.precog_session_id is required",
                "integration.precog_session_id",
            )
        precog_session = self.load_session(precog_id)
        if not isinstance(precog_session, pc.PrecogSession):
            raise ProtocolError(
                "invalid_value",
                f"session {precog_id!r} is not a foresight session",
                "integration.precog_session_id",
            )
        externals = [
            ser.parse_fragment(raw, f"integration.externals.{i}")
            for i, raw in enumerate(block.get("externals", []))
        ]
        session, run = derive_collider_session(
            precog_session,
            list(block.get("select", [])),
            externals,
            theme,
            session_id,
        )
        self.store.append(
            make_record(
                Protocol.INTEGRATION.value,
                precog_session.theme_key,
                ser.integration_to_payload(run),
                f"{run.id}:0000",
            )
        )
        return session

    def _fresh_session_id(self, protocol: str) -> str:
        existing = {
            r.payload.get("id")
            for r in self.store.records()
            if r.protocol == protocol
        }
        n = len(existing) + 1
        while f"{protocol}-{n}" in existing:
            n += 1
        return f"{protocol}-{n}"

    # --- step application -----------------------------------------------------------

    def apply_step(self, session_id: str, step_name: str, body: dict) -> dict:
        with self._lock_for(session_id):
            session = self.load_session(session_id)
            if isinstance(session, gc.ColliderSession):
                if step_name not in GHOSTY_STEPS:
                    raise ProtocolError(
                        "unknown_step",
                        f"step {step_name!r} does not apply to a ghosty session "
                        f"(expected one of: {', '.join(sorted(GHOSTY_STEPS))})",
                    )
                self._ghosty_step(session, step_name, body)
            else:
                if step_name not in PRECOG_STEPS:
                    raise ProtocolError(
                        "unknown_step",
                        f"step {step_name!r} does not apply to a precog session "
                        f"(expected one of: {', '.join(sorted(PRECOG_STEPS))})",
                    )
                self._precog_step(session, step_name, body)
            return self._snapshot(session)

    def _ghosty_step(self, session: gc.ColliderSession, step: str, body: dict) -> None:
        if step == "fragment":
            session.add_fragment(ser.parse_fragment(body, "fragment"))
        elif step == "advance":
            session.begin_ghosting()
        elif step == "ghost":
            if session.status is gc.ColliderStatus.DRAFT:
                session.begin_ghosting()
                if session.status is gc.ColliderStatus.ABORTED_PREFLIGHT:
                    return
            ghost = ser.parse_ghost(body, "ghost")
            session.attach_ghost(ghost.fragment_id, ghost, self.config)
        elif step == "collision":
            pair = body.get("pair")
            if not isinstance(pair, list) or len(pair) != 2:
                raise ProtocolError(
                    "invalid_value", "pair must be a two-element list", "pair"
                )
            score = ser.parse_enum(gc.CollisionScore, body.get("score"), "score")
            session.score_collision(
                (str(pair[0]), str(pair[1])), score, body.get("rationale", ""), self.config
            )
        elif step == "vision":
            vision = ser.parse_vision(body, f"v{len(session.visions) + 1}", "vision")
            session.crystallize_vision(vision.collision_id, vision)
        elif step == "bridge":
            bridge = ser.parse_bridge(body, "bridge")
            session.attach_bridge(bridge.vision_id, bridge)
        elif step == "complete":
            session.complete()

    def _precog_step(self, session: pc.PrecogSession, step: str, body: dict) -> None:
        if step == "signal":
            session.add_signal(ser.parse_signal(body, "signal"))
        elif step == "advance":
            session.advance()
        elif step == "convergence":
            session.add_convergence(
                ser.parse_convergence(body, f"c{len(session.convergences) + 1}", "convergence")
            )
        elif step == "contrarian":
            session.set_contrarian(ser.parse_contrarian(body, "contrarian"))
        elif step == "grid":
            label = body.get("label", "")
            session.record_grid(label, ser.parse_grid(body, "grid"), self.config)
        elif step == "action":
            session.add_action(
                ser.parse_action(body, f"a{len(session.actions) + 1}", "action")
            )
        elif step == "finalize":
            session.finalize()

    # --- gate views --------------------------------------------------------------

    def gates(self, session_id: str) -> dict:
        session = self.load_session(session_id)
        if isinstance(session, gc.ColliderSession):
            pending = (
                session.pending_pairs()
                if session.status
                in (gc.ColliderStatus.COLLIDING, gc.ColliderStatus.GHOSTING, gc.ColliderStatus.DRAFT)
                else []
            )
            gate = session.gate
            return {
                "protocol": "ghosty",
                "status": session.status.value,
                "pairs_total": len(session.all_pairs()),
                "pairs_scored": len(session.collisions),
                "pending_pairs": [list(p) for p in pending],
                "collision_gate": None
                if gate is None
                else {
                    "kind": gate.kind,
                    "electric": list(gate.electric),
                    "electric_inflation": gate.electric_inflation,
                    "high_electric_rate": gate.high_electric_rate,
                },
                "advancing_visions": [v.id for v in session.visions if v.advances],
                "warnings": list(session.warnings),
                "abort_reason": session.abort_reason,
            }
        return {
            "protocol": "precog",
            "status": session.status.value,
            "signal_count": len(session.signals),
            "escalation_required": session.escalation_required(),
            "missing_for_finalize": session.unmet_requirements(),
            "warnings": list(session.warnings),
        }

    # --- history, predictions, rubric ---------------------------------------------

    def history_diff(self, theme_key: str) -> dict:
        snapshots = self.store.sessions_for_theme(theme_key, Protocol.PRECOG.value)
        if len(snapshots) < 2:
            return {
                "theme_key": theme_key,
                "available": False,
                "sessions_found": len(snapshots),
                "deltas": [],
            }
        prev_payload, curr_payload = snapshots[-2], snapshots[-1]
        prev = ser.precog_from_payload(prev_payload)
        curr = ser.precog_from_payload(curr_payload)
        deltas = diff_signals(prev.signals, curr.signals)
        return {
            "theme_key": theme_key,
            "available": True,
            "sessions_found": len(snapshots),
            "prev_session": prev.id,
            "curr_session": curr.id,
            "deltas": [
                {
                    "signal_key": d.signal_key,
                    "classification": d.classification.value,
                    "prev_strength": d.prev_strength.value if d.prev_strength else None,
                    "curr_strength": d.curr_strength.value if d.curr_strength else None,
                    "priority": d.priority,
                }
                for d in deltas
            ],
        }

    def add_prediction(self, body: dict) -> dict:
        horizon = body.get("horizon") or {}
        prediction = PredictionRecord(
            id=body.get("id") or f"pred-{len(load_predictions(self.store)) + 1}",
            theme_key=body.get("theme_key", ""),
            statement=body.get("statement", ""),
            horizon_start=horizon.get("start", ""),
            horizon_end=horizon.get("end", ""),
        )
        if not prediction.theme_key.strip():
            raise ProtocolError("empty_field", "theme_key must be non-empty", "theme_key")
        record_prediction(self.store, prediction)
        return prediction.payload()

    def evaluate_prediction(self, prediction_id: str, body: dict) -> dict:
        outcome = ser.parse_enum(PredictionOutcome, body.get("outcome"), "outcome")
        record = evaluate_prediction(
            self.store,
            prediction_id,
            outcome,
            body.get("timing_accuracy"),
            body.get("contrarian_value"),
        )
        payload = record.payload()
        payload["summary"] = prediction_summary(self.store, record.theme_key)
        return payload

    def rubric(self, body: dict) -> dict:
        target = body.get("target_ref", "")
        if not str(target).strip():
            raise ProtocolError("empty_field", "target_ref must be non-empty", "target_ref")
        scores = body.get("scores")
        if not isinstance(scores, list):
            raise ProtocolError("rubric_shape", "scores must be a list of 8 integers", "scores")
        labels = body.get("labels") or self.config.rubric_labels
        result = score_rubric(str(target), scores, labels)
        payload = {
            "target_ref": result.target_ref,
            "dimension_scores": result.dimension_scores,
            "dimension_labels": result.dimension_labels,
            "total": result.total,
        }
        existing = sum(
            1
            for r in self.store.records()
            if r.protocol == "rubric" and r.payload.get("target_ref") == result.target_ref
        )
        record = make_record(
            "rubric", result.target_ref, payload, f"rubric:{result.target_ref}:{existing + 1}"
        )
        self.store.append(record)
        return payload
