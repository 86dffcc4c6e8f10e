"""Session report export: human-readable markdown or canonical data.

The markdown trace follows step order and shows every gate result and
flag; an aborted session's trace ends with the abort reason. The data
format is the exact ledger payload (canonical JSON), so re-importing an
export reproduces the record byte for byte.
"""

from __future__ import annotations

from . import collider as gc
from . import precog as pc
from .serialize import session_to_payload
from .util import canonical_json


def export_report(session, format: str = "md") -> str:
    if format == "data":
        return canonical_json(session_to_payload(session))
    if format != "md":
        raise ValueError(f"unknown export format {format!r}")
    if isinstance(session, gc.ColliderSession):
        return _collider_md(session)
    return _precog_md(session)


def _collider_md(s: gc.ColliderSession) -> str:
    lines = [f"# Collider session {s.id}", "", f"- theme: {s.theme}", f"- status: {s.status.value}"]
    lines += ["", "## Fragments"]
    for f in s.fragments:
        conf = f" [{f.confidence.value}]" if f.confidence else ""
        lines.append(f"- **{f.id}** ({f.domain_tag}, {f.source_kind.value}{conf}): {f.text}")
    if s.ghosts:
        lines += ["", "## Ghosts"]
        for g in s.ghosts:
            warn = " _(shallow-ghost warning)_" if g.shallow_warning == "warn" else ""
            lines.append(f"- {g.fragment_id}: {g.structural_description}{warn}")
    if s.collisions:
        lines += ["", "## Collision matrix"]
        for c in s.collisions:
            rationale = f" — {c.rationale}" if c.rationale else ""
            lines.append(f"- {c.pair[0]} x {c.pair[1]}: **{c.score.value}**{rationale}")
    if s.gate is not None:
        lines += ["", "## Collision gate"]
        lines.append(f"- outcome: {s.gate.kind}")
        if s.gate.electric:
            lines.append(f"- electric: {', '.join(s.gate.electric)}")
        if s.gate.electric_inflation:
            lines.append("- flag: electric inflation (every pair electric)")
        if s.gate.high_electric_rate:
            lines.append("- flag: high electric rate")
    if s.visions:
        lines += ["", "## Visions"]
        for v in s.visions:
            r = v.ratings
            lines.append(
                f"- **{v.name}** ({v.id}, from {v.collision_id}): {v.one_line}\n"
                f"  - emotion: {v.emotion}\n"
                f"  - image: {v.cinematic_image}\n"
                f"  - why now: {v.why_now}\n"
                f"  - ratings: novelty {r.novelty}, feasibility {r.feasibility}, "
                f"resonance {r.resonance}, timing {r.timing} — "
                f"{'advances' if v.advances else 'does not advance'}"
            )
    if s.bridges:
        lines += ["", "## Reality bridges"]
        for b in s.bridges:
            lines.append(
                f"- vision {b.vision_id}:\n"
                f"  - mvv: {b.mvv}\n"
                f"  - kill conditions: {'; '.join(b.kill_conditions)}\n"
                f"  - first step (24h): {b.first_step_24h}"
            )
    if s.warnings:
        lines += ["", "## Warnings"] + [f"- {w}" for w in s.warnings]
    if s.abort_reason:
        lines += ["", f"**Aborted: {s.abort_reason}**"]
    return "\n".join(lines) + "\n"


def _precog_md(s: pc.PrecogSession) -> str:
    lines = [
        f"# Foresight session {s.id}",
        "",
        f"- theme: {s.theme_key}",
        f"- horizon: {s.horizon}",
        f"- status: {s.status.value}",
        "",
        "## Signal map",
    ]
    arrow = {"accelerating": "up", "stable": "flat", "decelerating": "down"}
    for sig in s.signals:
        lines.append(
            f"- **{sig.key}** ({sig.strength.value}, {arrow[sig.direction.value]}, "
            f"[{sig.confidence.value}], {sig.source_kind.value}): {sig.description}"
        )
        for e in sig.evidence:
            lines.append(f"  - {e.claim} ({e.source})")
    if s.convergences:
        lines += ["", "## Convergence points"]
        for c in s.convergences:
            lines.append(
                f"- **{c.id}** (signals {', '.join(c.signal_keys)}; "
                f"confidence {c.confidence.value}): {c.hypothesis}\n"
                f"  - logic: {c.causal_logic}"
            )
    if s.contrarian is not None:
        lines += ["", "## Contrarian view", f"- overestimation: {s.contrarian.overestimation_reason}"]
        for sc in s.contrarian.scenarios:
            low, high = int(round(sc.probability_low * 100)), int(round(sc.probability_high * 100))
            lines.append(
                f"- scenario ({low}-{high}%): {sc.description}\n"
                f"  - analogy: {sc.historical_analogy}\n"
                f"  - collapse trigger: {sc.collapse_trigger}"
            )
    if s.grid_evaluations:
        lines += ["", "## Timing grid"]
        for e in s.grid_evaluations:
            g, j = e.grid, e.judgment
            esc = "required" if j.escalated_contrarian_required else "none"
            lines.append(
                f"- **{e.label}**: {g.market_phase.value} / {g.competitive.value} / "
                f"{g.readiness.value} / {g.external_window.value} -> "
                f"**{j.overall.value}** (sum={j.polarity_sum}, escalation: {esc})"
            )
    if s.actions:
        lines += ["", "## Action window"]
        for a in s.actions:
            lines.append(
                f"- [{a.category.value}] {a.action} (trigger: {a.trigger}; cost: {a.cost_estimate})"
            )
    if s.warnings:
        lines += ["", "## Warnings"] + [f"- {w}" for w in s.warnings]
    return "\n".join(lines) + "\n"
