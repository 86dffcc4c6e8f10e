"""Shared fixture loaders and replay drivers used across the test suite."""

from __future__ import annotations

import json
from pathlib import Path

from protorail import (
    ColliderSession,
    Ghost,
    GhostChecklist,
    PrecogSession,
)
from protorail.serialize import (
    parse_bridge,
    parse_contrarian,
    parse_convergence,
    parse_fragment,
    parse_grid,
    parse_signal,
    parse_vision,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name: str) -> dict:
    with open(FIXTURES / name, encoding="utf-8") as fh:
        return json.load(fh)


def case_d_session() -> ColliderSession:
    """Replay the music-production case end to end through the core ops."""
    doc = load_fixture("case_d.json")
    session = ColliderSession.draft(doc["theme"], doc["id"])
    for raw in doc["fragments"]:
        session.add_fragment(parse_fragment(raw))
    session.begin_ghosting()
    for fragment_id, text in doc["ghosts"].items():
        session.attach_ghost(
            fragment_id,
            Ghost(
                fragment_id=fragment_id,
                structural_description=text,
                checklist=GhostChecklist(True, True, True, True),
            ),
        )
    for entry in doc["scores"]:
        session.score_collision(
            tuple(entry["pair"]), _score(entry["score"]), entry.get("rationale", "")
        )
    for raw in doc["visions"]:
        vision = parse_vision(raw, raw["id"])
        session.crystallize_vision(vision.collision_id, vision)
    bridge = parse_bridge(doc["bridge"])
    session.attach_bridge(bridge.vision_id, bridge)
    session.complete()
    return session


def _score(value: str):
    from protorail import CollisionScore

    return CollisionScore(value)


def case_c_session(stop_after: str | None = None) -> PrecogSession:
    """Replay the trend-forecasting case through the core ops.

    ``stop_after`` halts the replay after "signals", "convergences",
    "contrarian", or "grids" for tests that need a mid-phase session.
    """
    doc = load_fixture("case_c.json")
    session = PrecogSession.new(doc["theme_key"], doc["id"], doc["horizon"])
    for raw in doc["signals"]:
        session.add_signal(parse_signal(raw))
    if stop_after == "signals":
        return session
    session.advance()
    for raw in doc["convergences"]:
        session.add_convergence(parse_convergence(raw, raw["id"]))
    if stop_after == "convergences":
        return session
    session.advance()
    session.set_contrarian(parse_contrarian(doc["contrarian"]))
    if stop_after == "contrarian":
        return session
    session.advance()
    for raw in doc["grids"]:
        session.record_grid(raw["label"], parse_grid(raw))
    if stop_after == "grids":
        return session
    session.advance()
    for raw in doc["actions"]:
        from protorail.serialize import parse_action

        session.add_action(parse_action(raw, raw["id"]))
    session.finalize()
    return session


# --- Case B dual-path replay -----------------------------------------------------


def replay_case_b(driver) -> dict:
    """Issue the full integrated replay through ``driver``.

    The driver exposes create(body) and step(session_id, name, body);
    both interface paths implement the same two calls, so the logical
    step sequence is identical by construction.
    """
    doc = load_fixture("case_b.json")
    precog = doc["precog"]
    ghosty = doc["ghosty"]
    driver.create(
        {
            "protocol": "precog",
            "id": precog["id"],
            "theme_key": precog["theme_key"],
            "horizon": precog["horizon"],
        }
    )
    for signal in precog["signals"]:
        driver.step(precog["id"], "signal", signal)
    driver.step(precog["id"], "advance", {})
    for convergence in precog["convergences"]:
        driver.step(precog["id"], "convergence", convergence)
    driver.step(precog["id"], "advance", {})
    driver.step(precog["id"], "contrarian", precog["contrarian"])
    driver.step(precog["id"], "advance", {})
    driver.create(
        {
            "protocol": "ghosty",
            "id": ghosty["id"],
            "theme": ghosty["theme"],
            "integration": {
                "precog_session_id": precog["id"],
                "select": doc["integration"]["select"],
                "externals": doc["integration"]["externals"],
            },
        }
    )
    driver.step(ghosty["id"], "advance", {})
    for fragment_id, text in ghosty["ghosts"].items():
        driver.step(
            ghosty["id"],
            "ghost",
            {
                "fragment_id": fragment_id,
                "structural_description": text,
                "checklist": {
                    "uses_verbs": True,
                    "includes_emotion": True,
                    "cross_domain_comprehensible": True,
                    "reversibility_pass": True,
                },
            },
        )
    for entry in ghosty["scores"]:
        driver.step(
            ghosty["id"],
            "collision",
            {
                "pair": entry["pair"],
                "score": entry["score"],
                "rationale": entry.get("rationale", ""),
            },
        )
    for vision in ghosty["visions"]:
        driver.step(ghosty["id"], "vision", vision)
    driver.step(ghosty["id"], "bridge", ghosty["bridge"])
    driver.step(ghosty["id"], "complete", {})
    for grid in precog["grids"]:
        driver.step(precog["id"], "grid", grid)
    driver.step(precog["id"], "advance", {})
    for action in precog["actions"]:
        driver.step(precog["id"], "action", action)
    final = driver.step(precog["id"], "finalize", {})
    return final
