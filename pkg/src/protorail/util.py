"""Small shared helpers: canonical JSON, UTC clock, tokenization."""

from __future__ import annotations

import json
import os
import re
from datetime import datetime, timezone

CLOCK_ENV = "PROTORAIL_CLOCK"

_WORD = re.compile(r"[a-z0-9]+")

# Compact English stopword list used by the shallow-ghost heuristic.
# Deliberately small and frozen: the heuristic is advisory and must be
# deterministic across machines, so no external NLP dependency.
STOPWORDS = frozenset(
    """
    a about above after again all an and any are as at be because been being
    before below between both but by can could did do does down during each
    few for from further had has have having he her here hers him his how i
    if in into is it its itself just me more most my no nor not now of off
    on once only or other our out over own same she should so some such than
    that the their them then there these they this those through to too under
    until up very was we were what when where which while who whom why will
    with would yet you your s t
    """.split()
)


def tokens(text: str) -> set[str]:
    """Case-folded, stopword-stripped content tokens of ``text``."""
    return {w for w in _WORD.findall(text.casefold()) if w not in STOPWORDS}


def canonical_json(obj) -> str:
    """Stable serialization: sorted keys, no whitespace, raw UTF-8."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def now_utc() -> datetime:
    """Current UTC time, overridable via the PROTORAIL_CLOCK env var.

    A fixed clock makes replays reproducible: two runs of the same step
    sequence then produce byte-identical ledger records.
    """
    fixed = os.environ.get(CLOCK_ENV)
    if fixed:
        return parse_utc(fixed)
    return datetime.now(timezone.utc)


def iso_utc(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_utc(stamp: str) -> datetime:
    dt = datetime.fromisoformat(stamp.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt
