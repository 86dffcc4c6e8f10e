"""Append-only session ledger, longitudinal signal deltas, predictions,
and rubric scoring.

Store format: one UTF-8 line per record, each line a self-contained JSON
object with fields {record_id, protocol, theme_key, created_at,
schema_version, payload}. Lines are written under a file lock (single
writer), flushed and fsynced per append; a truncated trailing line —
e.g. after a crash mid-write — is tolerated and skipped with a warning.
Records are immutable: an "update" is always a new record (predictions
gain a separate evaluation record; sessions append a snapshot per
revision, so replaying the file reconstructs every view).

Signal deltas compare two snapshots of the same theme key-by-key:
strength rank movement wins, direction movement breaks rank ties, and
appearing/disappearing keys are flagged new/dead with priority — the
strongest evidence of structural change.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import dataclass, field
from enum import Enum

from filelock import FileLock

from .errors import ProtocolError, StorageError
from .precog import DIRECTION_RANK, STRENGTH_RANK, Signal, SignalStrength
from .util import canonical_json, iso_utc, now_utc

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

# Record kinds beyond the three session protocols.
KIND_PREDICTION = "prediction"
KIND_PREDICTION_EVAL = "prediction_evaluation"
KIND_RUBRIC = "rubric"


class Protocol(str, Enum):
    GHOSTY = "ghosty"
    PRECOG = "precog"
    INTEGRATION = "integration"


@dataclass
class SessionRecord:
    record_id: str
    protocol: str
    theme_key: str
    created_at: str
    payload: dict
    schema_version: int = SCHEMA_VERSION

    def to_line(self) -> str:
        return canonical_json(
            {
                "record_id": self.record_id,
                "protocol": self.protocol,
                "theme_key": self.theme_key,
                "created_at": self.created_at,
                "schema_version": self.schema_version,
                "payload": self.payload,
            }
        )

    @classmethod
    def from_line(cls, line: str) -> "SessionRecord":
        raw = json.loads(line)
        return cls(
            record_id=raw["record_id"],
            protocol=raw["protocol"],
            theme_key=raw["theme_key"],
            created_at=raw["created_at"],
            schema_version=raw["schema_version"],
            payload=raw["payload"],
        )


class Store:
    """Append-only record store over a single JSONL file."""

    def __init__(self, path: str):
        self.path = path
        # File lock for cross-process single-writer; mutex for threads in
        # this process (the file lock is reentrant within one process).
        self._lock = FileLock(str(path) + ".lock")
        self._mutex = threading.Lock()
        self._known_ids: set[str] | None = None

    # --- reads ---------------------------------------------------------------

    def records(self) -> list[SessionRecord]:
        if not os.path.exists(self.path):
            return []
        out: list[SessionRecord] = []
        try:
            with open(self.path, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise StorageError("storage_failure", f"cannot read store: {exc}") from exc
        for lineno, raw in enumerate(data.split(b"\n"), start=1):
            if not raw:
                continue
            try:
                out.append(SessionRecord.from_line(raw.decode("utf-8")))
            except (ValueError, KeyError, UnicodeDecodeError):
                log.warning(
                    "store %s: skipping corrupt record on line %d (truncated write?)",
                    self.path,
                    lineno,
                )
        return out

    def read(self, record_id: str) -> SessionRecord:
        for record in self.records():
            if record.record_id == record_id:
                return record
        raise StorageError("unknown_record", f"no record with id {record_id!r}")

    # --- writes --------------------------------------------------------------

    def _ends_with_newline(self) -> bool:
        with open(self.path, "rb") as fh:
            fh.seek(-1, os.SEEK_END)
            return fh.read(1) == b"\n"

    def append(self, record: SessionRecord) -> str:
        """Durably append one record; existing records are never touched."""
        line = record.to_line()
        with self._mutex, self._lock:
            if self._known_ids is None:
                self._known_ids = {r.record_id for r in self.records()}
            if record.record_id in self._known_ids:
                raise StorageError(
                    "duplicate_id", f"record id {record.record_id!r} already stored"
                )
            try:
                with open(self.path, "ab") as fh:
                    if fh.tell() > 0 and not self._ends_with_newline():
                        # Terminate a truncated tail (crash mid-write) so the
                        # corrupt partial line stays isolated and skipped.
                        fh.write(b"\n")
                    fh.write(line.encode("utf-8") + b"\n")
                    fh.flush()
                    os.fsync(fh.fileno())
            except OSError as exc:
                raise StorageError("storage_failure", f"append failed: {exc}") from exc
            self._known_ids.add(record.record_id)
        return record.record_id

    # --- session views ---------------------------------------------------------

    def latest_payload(self, session_id: str) -> dict | None:
        """Latest snapshot payload for a session id, or None."""
        latest: dict | None = None
        for record in self.records():
            if record.payload.get("id") == session_id and record.protocol in (
                Protocol.GHOSTY.value,
                Protocol.PRECOG.value,
            ):
                latest = record.payload
        return latest

    def sessions_for_theme(self, theme_key: str, protocol: str) -> list[dict]:
        """Latest snapshot per session id, in first-appearance order."""
        order: list[str] = []
        latest: dict[str, dict] = {}
        for record in self.records():
            if record.protocol != protocol or record.theme_key != theme_key:
                continue
            sid = record.payload.get("id")
            if sid not in latest:
                order.append(sid)
            latest[sid] = record.payload
        return [latest[sid] for sid in order]


def make_record(protocol: str, theme_key: str, payload: dict, record_id: str) -> SessionRecord:
    return SessionRecord(
        record_id=record_id,
        protocol=protocol,
        theme_key=theme_key,
        created_at=iso_utc(now_utc()),
        payload=payload,
    )


# --- signal history ------------------------------------------------------------


class DeltaClass(str, Enum):
    STRENGTHENED = "strengthened"
    STABLE = "stable"
    WEAKENED = "weakened"
    NEW = "new"
    DEAD = "dead"


@dataclass
class SignalDelta:
    signal_key: str
    classification: DeltaClass
    prev_strength: SignalStrength | None = None
    curr_strength: SignalStrength | None = None
    priority: bool = False


def _keyed(snapshot: list[Signal], side: str) -> dict[str, Signal]:
    keyed: dict[str, Signal] = {}
    for signal in snapshot:
        if signal.key in keyed:
            raise ProtocolError(
                "duplicate_key",
                f"signal key {signal.key!r} appears twice in the {side} snapshot",
            )
        keyed[signal.key] = signal
    return keyed


def diff_signals(prev: list[Signal], curr: list[Signal]) -> list[SignalDelta]:
    """Classify every key in either snapshot; output sorted by key."""
    prev_map = _keyed(prev, "previous")
    curr_map = _keyed(curr, "current")
    deltas: list[SignalDelta] = []
    for key in sorted(prev_map.keys() | curr_map.keys()):
        before, after = prev_map.get(key), curr_map.get(key)
        if before is None:
            deltas.append(
                SignalDelta(key, DeltaClass.NEW, None, after.strength, priority=True)
            )
            continue
        if after is None:
            deltas.append(
                SignalDelta(key, DeltaClass.DEAD, before.strength, None, priority=True)
            )
            continue
        rank_before, rank_after = STRENGTH_RANK[before.strength], STRENGTH_RANK[after.strength]
        if rank_after > rank_before:
            cls = DeltaClass.STRENGTHENED
        elif rank_after < rank_before:
            cls = DeltaClass.WEAKENED
        else:
            dir_before = DIRECTION_RANK[before.direction]
            dir_after = DIRECTION_RANK[after.direction]
            if dir_after > dir_before:
                cls = DeltaClass.STRENGTHENED
            elif dir_after < dir_before:
                cls = DeltaClass.WEAKENED
            else:
                cls = DeltaClass.STABLE
        deltas.append(SignalDelta(key, cls, before.strength, after.strength))
    return deltas


# --- prediction feedback loop -----------------------------------------------------


class PredictionOutcome(str, Enum):
    HIT = "hit"
    MISS = "miss"
    PARTIAL = "partial"


@dataclass
class PredictionRecord:
    id: str
    theme_key: str
    statement: str
    horizon_start: str
    horizon_end: str
    outcome: PredictionOutcome | None = None
    timing_accuracy: str | None = None
    contrarian_value: str | None = None

    def payload(self) -> dict:
        return {
            "id": self.id,
            "theme_key": self.theme_key,
            "statement": self.statement,
            "horizon": {"start": self.horizon_start, "end": self.horizon_end},
            "outcome": self.outcome.value if self.outcome else None,
            "timing_accuracy": self.timing_accuracy,
            "contrarian_value": self.contrarian_value,
        }


def load_predictions(store: Store) -> dict[str, PredictionRecord]:
    """Rebuild prediction state: base records merged with evaluations."""
    predictions: dict[str, PredictionRecord] = {}
    for record in store.records():
        if record.protocol == KIND_PREDICTION:
            p = record.payload
            predictions[p["id"]] = PredictionRecord(
                id=p["id"],
                theme_key=p["theme_key"],
                statement=p["statement"],
                horizon_start=p["horizon"]["start"],
                horizon_end=p["horizon"]["end"],
            )
        elif record.protocol == KIND_PREDICTION_EVAL:
            p = record.payload
            base = predictions.get(p["prediction_id"])
            if base is not None:
                base.outcome = PredictionOutcome(p["outcome"])
                base.timing_accuracy = p.get("timing_accuracy")
                base.contrarian_value = p.get("contrarian_value")
    return predictions


def record_prediction(store: Store, prediction: PredictionRecord) -> str:
    if not prediction.statement.strip():
        raise ProtocolError(
            "empty_field", "prediction statement must be non-empty", "statement"
        )
    if prediction.id in load_predictions(store):
        raise ProtocolError(
            "duplicate_prediction", f"prediction id {prediction.id!r} already recorded", "id"
        )
    record = make_record(
        KIND_PREDICTION, prediction.theme_key, prediction.payload(), f"{prediction.id}:p"
    )
    store.append(record)
    return prediction.id


def evaluate_prediction(
    store: Store,
    prediction_id: str,
    outcome: PredictionOutcome,
    timing_accuracy: str | None = None,
    contrarian_value: str | None = None,
) -> PredictionRecord:
    predictions = load_predictions(store)
    base = predictions.get(prediction_id)
    if base is None:
        raise ProtocolError(
            "unknown_prediction", f"no prediction with id {prediction_id!r}", "id"
        )
    if base.outcome is not None:
        raise ProtocolError(
            "already_evaluated",
            f"prediction {prediction_id!r} already has outcome {base.outcome.value}",
            "outcome",
        )
    payload = {
        "prediction_id": prediction_id,
        "outcome": outcome.value,
        "timing_accuracy": timing_accuracy,
        "contrarian_value": contrarian_value,
    }
    store.append(make_record(KIND_PREDICTION_EVAL, base.theme_key, payload, f"{prediction_id}:e"))
    base.outcome = outcome
    base.timing_accuracy = timing_accuracy
    base.contrarian_value = contrarian_value
    return base


def prediction_summary(store: Store, theme_key: str) -> dict[str, int]:
    """Counts of hit/miss/partial over evaluated predictions of a theme."""
    counts = {"hit": 0, "miss": 0, "partial": 0}
    for prediction in load_predictions(store).values():
        if prediction.theme_key == theme_key and prediction.outcome is not None:
            counts[prediction.outcome.value] += 1
    return counts


# --- rubric scoring ---------------------------------------------------------------

RUBRIC_DIMENSIONS = 8
RUBRIC_SCALE_MAX = 10


@dataclass
class RubricScore:
    target_ref: str
    dimension_scores: list[int]
    dimension_labels: list[str]
    total: int = field(init=False)

    def __post_init__(self):
        self.total = sum(self.dimension_scores)


def score_rubric(
    target_ref: str, scores: list[int], labels: list[str] | None = None
) -> RubricScore:
    """Fixed-shape rubric: exactly 8 dimensions, each 0..10, total <= 80."""
    if len(scores) != RUBRIC_DIMENSIONS:
        raise ProtocolError(
            "rubric_shape",
            f"a rubric has exactly {RUBRIC_DIMENSIONS} dimension scores, got {len(scores)}",
            "scores",
        )
    for i, value in enumerate(scores):
        if not isinstance(value, int) or not 0 <= value <= RUBRIC_SCALE_MAX:
            raise ProtocolError(
                "score_out_of_range",
                f"dimension score must be an integer in 0..{RUBRIC_SCALE_MAX}, got {value!r}",
                f"scores.{i}",
            )
    if labels is None:
        labels = [f"dimension_{i + 1}" for i in range(RUBRIC_DIMENSIONS)]
    if len(labels) != RUBRIC_DIMENSIONS:
        raise ProtocolError(
            "rubric_shape",
            f"a rubric has exactly {RUBRIC_DIMENSIONS} dimension labels, got {len(labels)}",
            "labels",
        )
    return RubricScore(target_ref=target_ref, dimension_scores=list(scores), dimension_labels=list(labels))
