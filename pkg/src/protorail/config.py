"""Runtime configuration: tunable thresholds and environment wiring.

All gate thresholds that are heuristics rather than hard protocol rules
live here so an operator can retune them from a JSON config file without
touching code. Hard rules (fragment counts, checklist gates, rating
ranges) are NOT configurable on purpose.

Environment variables:
    PROTORAIL_STORE              path of the append-only store file
    PROTORAIL_CONFIG             path of a JSON config file
    PROTORAIL_GENERATOR_URL      external text generator endpoint
    PROTORAIL_GENERATOR_TIMEOUT  generator timeout in seconds
    PROTORAIL_CLOCK              fixed ISO-8601 time for reproducible replays
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace

STORE_ENV = "PROTORAIL_STORE"
CONFIG_ENV = "PROTORAIL_CONFIG"
GENERATOR_URL_ENV = "PROTORAIL_GENERATOR_URL"
GENERATOR_TIMEOUT_ENV = "PROTORAIL_GENERATOR_TIMEOUT"

DEFAULT_STORE_PATH = "protorail-store.jsonl"

# Per-axis polarity of every timing-grid value. The overall call is an
# affine rule over the four polarities; see precog.evaluate_timing_grid.
DEFAULT_POLARITY: dict[str, dict[str, int]] = {
    "market_phase": {
        "pre_emergence": -1,
        "emergence": 1,
        "acceleration": 1,
        "peak": 0,
        "correction": -1,
        "plateau": -1,
    },
    "competitive": {
        "first_mover": 1,
        "fast_follower": 1,
        "fortifier": 0,
        "too_late": -1,
        "undefined": 0,
    },
    "readiness": {
        "ready": 1,
        "partially_ready": 0,
        "not_ready": -1,
    },
    "external_window": {
        "open": 1,
        "opening": 0,
        "closed": -1,
    },
}

DEFAULT_RUBRIC_LABELS = [
    "novelty",
    "coherence",
    "specificity",
    "feasibility",
    "emotional_resonance",
    "internal_consistency",
    "actionability",
    "generativity",
]


@dataclass(frozen=True)
class Config:
    # Advisory shallow-ghost detector: warn above this token-overlap ratio.
    shallow_ghost_threshold: float = 0.6
    # Advisory warning when more than this share of pairs score electric
    # (the hard inflation flag fires only at 100% with >= 3 pairs).
    high_electric_rate: float = 0.7
    # Timing-grid thresholds: go when sum >= go_min, soon when >= soon_min,
    # watch otherwise.
    go_min: int = 3
    soon_min: int = 1
    polarity: dict[str, dict[str, int]] = field(
        default_factory=lambda: {k: dict(v) for k, v in DEFAULT_POLARITY.items()}
    )
    # Vision feasibility -> readiness axis suggestion.
    readiness_ready_min: int = 4
    readiness_partial_min: int = 3
    rubric_labels: list[str] = field(default_factory=lambda: list(DEFAULT_RUBRIC_LABELS))
    generator_url: str | None = None
    generator_timeout: float = 10.0


DEFAULT_CONFIG = Config()


def load_config(path: str | None = None, env: dict | None = None) -> Config:
    """Build a Config from a JSON file plus environment overrides."""
    env = os.environ if env is None else env
    cfg = Config()
    path = path or env.get(CONFIG_ENV)
    if path:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {f for f in cfg.__dataclass_fields__}
        overrides = {k: v for k, v in raw.items() if k in known}
        if "polarity" in overrides:
            merged = {k: dict(v) for k, v in DEFAULT_POLARITY.items()}
            for axis, table in overrides["polarity"].items():
                merged.setdefault(axis, {}).update(table)
            overrides["polarity"] = merged
        cfg = replace(cfg, **overrides)
    if env.get(GENERATOR_URL_ENV):
        cfg = replace(cfg, generator_url=env[GENERATOR_URL_ENV])
    if env.get(GENERATOR_TIMEOUT_ENV):
        cfg = replace(cfg, generator_timeout=float(env[GENERATOR_TIMEOUT_ENV]))
    return cfg


def store_path(env: dict | None = None) -> str:
    env = os.environ if env is None else env
    return env.get(STORE_ENV, DEFAULT_STORE_PATH)
