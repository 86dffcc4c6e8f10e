"""Batch execution and aggregate statistics over many collision runs.

Runs are independent: a provider failure in one run never invalidates the
outcomes already collected, and an abort (pre-flight or no-electric) is a
recorded Failure outcome, not an error.

Rates are exact fractions, not floats, so invariants like
success_rate + failure_rate == 1 and fixture hit rates like 1/3 hold
without tolerance. The one float output is the novelty/feasibility
correlation, pooled over every advancing vision in the batch; it is
absent when fewer than two visions advance or either side has zero
variance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Protocol as TypingProtocol

from .collider import (
    ColliderSession,
    ColliderStatus,
    CollisionScore,
    Fragment,
    Ghost,
    GhostChecklist,
    RealityBridge,
    SourceKind,
    Vision,
    VisionRatings,
    pair_id,
)
from .errors import ProtocolError, ProviderFailure


class RunResult(str, Enum):
    SUCCESS = "success"
    FAILURE = "failure"


@dataclass
class RunOutcome:
    """Aggregate view of one finished (or aborted) run."""

    pairing_label: str
    fragment_count: int
    pair_count: int
    electric_count: int
    interesting_count: int
    boring_count: int
    visions: list[tuple[int, int, int, int]]
    result: RunResult

    def __post_init__(self):
        scored = self.electric_count + self.interesting_count + self.boring_count
        if scored != self.pair_count:
            raise ProtocolError(
                "inconsistent_run",
                f"{self.pairing_label}: electric+interesting+boring = {scored} "
                f"but pair_count = {self.pair_count}",
            )
        expected = (
            RunResult.SUCCESS if any(min(v) >= 3 for v in self.visions) else RunResult.FAILURE
        )
        if self.result is not expected:
            raise ProtocolError(
                "inconsistent_run",
                f"{self.pairing_label}: result {self.result.value} does not match visions "
                f"(success iff at least one vision has min rating >= 3)",
            )

    def advancing_visions(self) -> list[tuple[int, int, int, int]]:
        return [v for v in self.visions if min(v) >= 3]

    def hit_rate(self) -> Fraction | None:
        if self.pair_count == 0:
            return None
        return Fraction(self.electric_count, self.pair_count)


@dataclass
class BatchStats:
    n_runs: int
    success_rate: Fraction
    failure_rate: Fraction
    per_run_hit_rates: list[Fraction | None]
    mean_hit_rate_successful: Fraction | None
    mean_hit_rate_all: Fraction | None
    total_visions: int
    mean_visions_per_successful: Fraction | None
    novelty_feasibility_r: float | None
    warnings: list[str] = field(default_factory=list)


def pearson(xs: list[float], ys: list[float]) -> float:
    """Product-moment correlation coefficient."""
    if len(xs) != len(ys):
        raise ProtocolError(
            "length_mismatch", f"series lengths differ: {len(xs)} vs {len(ys)}"
        )
    n = len(xs)
    if n < 2:
        raise ProtocolError("length_mismatch", "need at least two points")
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    dx = [x - mean_x for x in xs]
    dy = [y - mean_y for y in ys]
    var_x = sum(d * d for d in dx)
    var_y = sum(d * d for d in dy)
    if var_x == 0.0 or var_y == 0.0:
        raise ProtocolError("zero_variance", "correlation undefined for a constant series")
    r = sum(a * b for a, b in zip(dx, dy)) / math.sqrt(var_x * var_y)
    # Clamp rounding spill; the coefficient is bounded by definition.
    return max(-1.0, min(1.0, r))


def compute_stats(runs: list[RunOutcome]) -> BatchStats:
    if not runs:
        raise ProtocolError("empty_batch", "cannot compute statistics over zero runs")
    n = len(runs)
    successes = [r for r in runs if r.result is RunResult.SUCCESS]
    warnings: list[str] = []
    hit_rates: list[Fraction | None] = []
    for run in runs:
        rate = run.hit_rate()
        if rate is None:
            warnings.append(f"{run.pairing_label}: hit rate undefined (no pairs scored)")
        hit_rates.append(rate)

    def mean_rates(subset: list[RunOutcome]) -> Fraction | None:
        rates = [r.hit_rate() for r in subset if r.hit_rate() is not None]
        if not rates:
            return None
        return sum(rates, Fraction(0)) / len(rates)

    advancing = [v for run in runs for v in run.advancing_visions()]
    r_value: float | None = None
    if len(advancing) >= 2:
        novelty = [float(v[0]) for v in advancing]
        feasibility = [float(v[1]) for v in advancing]
        try:
            r_value = pearson(novelty, feasibility)
        except ProtocolError:
            r_value = None
    return BatchStats(
        n_runs=n,
        success_rate=Fraction(len(successes), n),
        failure_rate=Fraction(n - len(successes), n),
        per_run_hit_rates=hit_rates,
        mean_hit_rate_successful=mean_rates(successes),
        mean_hit_rate_all=mean_rates(runs),
        total_visions=len(advancing),
        mean_visions_per_successful=(
            Fraction(len(advancing), len(successes)) if successes else None
        ),
        novelty_feasibility_r=r_value,
        warnings=warnings,
    )


# --- batch execution -----------------------------------------------------------


@dataclass
class RunConfig:
    label: str
    theme: str
    fragments: list[Fragment]


class ContentProvider(TypingProtocol):
    """Answers the prose prompts of one run; scripted in fixtures,
    interactive when a human drives the batch."""

    def ghost_text(self, label: str, fragment: Fragment) -> str: ...

    def collision(
        self, label: str, pair: tuple[str, str], session: ColliderSession
    ) -> tuple[CollisionScore, str]: ...

    def visions(self, label: str, session: ColliderSession) -> list[dict]: ...

    def bridge(self, label: str, vision: Vision, session: ColliderSession) -> dict | None: ...


def outcome_from_session(label: str, session: ColliderSession) -> RunOutcome:
    electric = sum(1 for c in session.collisions if c.score is CollisionScore.ELECTRIC)
    interesting = sum(1 for c in session.collisions if c.score is CollisionScore.INTERESTING)
    boring = sum(1 for c in session.collisions if c.score is CollisionScore.BORING)
    visions = [v.ratings.as_tuple() for v in session.visions]
    result = (
        RunResult.SUCCESS
        if any(min(v) >= 3 for v in visions)
        else RunResult.FAILURE
    )
    return RunOutcome(
        pairing_label=label,
        fragment_count=len(session.fragments),
        pair_count=len(session.collisions),
        electric_count=electric,
        interesting_count=interesting,
        boring_count=boring,
        visions=visions,
        result=result,
    )


def run_batch(configs: list[RunConfig], provider: ContentProvider) -> list[RunOutcome]:
    """Execute the full state machine once per config.

    Aborted runs become Failure outcomes. A provider exception stops the
    batch but the outcomes of earlier runs ride along on the error.
    """
    outcomes: list[RunOutcome] = []
    for config in configs:
        try:
            outcomes.append(_run_one(config, provider))
        except ProtocolError:
            raise
        except Exception as exc:
            raise ProviderFailure(config.label, exc, outcomes) from exc
    return outcomes


def _run_one(config: RunConfig, provider: ContentProvider) -> RunOutcome:
    session = ColliderSession.draft(config.theme, f"batch-{config.label}")
    for fragment in config.fragments:
        session.add_fragment(fragment)
    session.begin_ghosting()
    if session.status is ColliderStatus.ABORTED_PREFLIGHT:
        return outcome_from_session(config.label, session)
    for fragment in config.fragments:
        text = provider.ghost_text(config.label, fragment)
        session.attach_ghost(
            fragment.id,
            Ghost(
                fragment_id=fragment.id,
                structural_description=text,
                checklist=GhostChecklist(True, True, True, True),
            ),
        )
    for pair in list(session.enumerate_pairs()):
        score, rationale = provider.collision(config.label, pair, session)
        session.score_collision(pair, score, rationale)
    if session.status is ColliderStatus.ABORTED_NO_ELECTRIC:
        return outcome_from_session(config.label, session)
    # Crystallize every vision first: bridging closes the crystallizing
    # phase, so no vision may arrive after the first bridge.
    advancing: list[Vision] = []
    for i, spec_v in enumerate(provider.visions(config.label, session), start=1):
        ratings = spec_v["ratings"]
        vision = Vision(
            id=spec_v.get("id", f"v{i}"),
            collision_id=spec_v["collision_id"],
            name=spec_v["name"],
            one_line=spec_v["one_line"],
            emotion=spec_v["emotion"],
            cinematic_image=spec_v["cinematic_image"],
            why_now=spec_v["why_now"],
            ratings=VisionRatings(*ratings),
        )
        if session.crystallize_vision(vision.collision_id, vision):
            advancing.append(vision)
    for vision in advancing:
        bridge_spec = provider.bridge(config.label, vision, session)
        if bridge_spec is not None:
            session.attach_bridge(
                vision.id,
                RealityBridge(
                    vision_id=vision.id,
                    mvv=bridge_spec["mvv"],
                    existing_capabilities=bridge_spec.get("existing_capabilities", []),
                    kill_conditions=bridge_spec["kill_conditions"],
                    first_step_24h=bridge_spec["first_step_24h"],
                ),
            )
    if session.status is ColliderStatus.BRIDGING:
        session.complete()
    return outcome_from_session(config.label, session)


class ScriptedProvider:
    """Provider that replays answers from a fixture document."""

    def __init__(self, script: dict[str, dict]):
        self.script = script

    def _run(self, label: str) -> dict:
        try:
            return self.script[label]
        except KeyError:
            raise KeyError(f"no scripted answers for run {label!r}")

    def ghost_text(self, label: str, fragment: Fragment) -> str:
        return self._run(label)["ghosts"][fragment.id]

    def collision(self, label, pair, session) -> tuple[CollisionScore, str]:
        entry = self._run(label)["scores"][pair_id(pair)]
        return CollisionScore(entry["score"]), entry.get("rationale", "")

    def visions(self, label, session) -> list[dict]:
        return self._run(label).get("visions", [])

    def bridge(self, label, vision, session) -> dict | None:
        for entry in self._run(label).get("bridges", []):
            if entry["vision_id"] == vision.id:
                return entry
        return None


def load_batch_fixture(path: str) -> tuple[list[RunConfig], ScriptedProvider]:
    """Read a batch fixture file (schema documented in the README)."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    configs: list[RunConfig] = []
    script: dict[str, dict] = {}
    for run in doc["runs"]:
        fragments = [
            Fragment(
                id=f["id"],
                text=f["text"],
                domain_tag=f["domain_tag"],
                source_kind=SourceKind(f.get("source_kind", "observation")),
            )
            for f in run["fragments"]
        ]
        configs.append(RunConfig(label=run["label"], theme=run.get("theme", run["label"]), fragments=fragments))
        script[run["label"]] = run
    return configs, ScriptedProvider(script)
