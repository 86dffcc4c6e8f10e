"""Error types shared by every protocol module.

Every rule violation raises :class:`ProtocolError` with a stable,
machine-readable ``code`` and, when a specific input field failed, a
dotted ``field_path`` (e.g. ``"ratings.novelty"``). The CLI maps these
to exit code 1 and the HTTP layer to an ``ok=false`` envelope carrying
the same code, so a violation looks identical on every surface.

Storage trouble is a separate class (CLI exit code 2): it means the
append-only store misbehaved, not that the operator's input was wrong.
"""

from __future__ import annotations


class ProtocolError(Exception):
    """A protocol rule or input validation violation."""

    def __init__(self, code: str, message: str, field_path: str | None = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.field_path = field_path

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "field_path": self.field_path}


class StorageError(ProtocolError):
    """The ledger store failed (I/O error, duplicate record id)."""


class GeneratorError(ProtocolError):
    """The external text generator is unreachable, slow, or unconfigured."""


class ProviderFailure(ProtocolError):
    """A batch content provider raised mid-run.

    Outcomes of runs completed before the failure are preserved on the
    exception so a partial batch is never silently lost.
    """

    def __init__(self, run_label: str, cause: Exception, completed: list):
        super().__init__(
            "provider_failure",
            f"provider failed during run {run_label!r}: {cause}",
        )
        self.run_label = run_label
        self.cause = cause
        self.completed = completed
