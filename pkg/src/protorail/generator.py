"""Client for an optional external text generator.

The engine never writes prose itself; when a generator endpoint is
configured it can be asked for a DRAFT for any step. Candidates are never
auto-committed — the operator reviews, edits and submits through the
normal validated step, so every gate still applies. With no endpoint
configured the operation is simply unavailable and manual entry is the
only path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import httpx

from .config import Config
from .errors import GeneratorError


class StepKind(str, Enum):
    GHOST = "ghost"
    COLLISION_RATIONALE = "collision_rationale"
    VISION = "vision"
    BRIDGE = "bridge"
    SIGNAL = "signal"
    CONTRARIAN = "contrarian"


@dataclass
class GeneratorRequest:
    step_kind: StepKind
    context: dict


@dataclass
class GeneratorResponse:
    candidate_text: str
    metadata: dict = field(default_factory=dict)


def request_generation(
    config: Config, request: GeneratorRequest, transport: httpx.BaseTransport | None = None
) -> GeneratorResponse:
    """Fetch one candidate draft for operator review.

    ``transport`` exists for tests; production callers leave it None.
    """
    if not config.generator_url:
        raise GeneratorError(
            "unconfigured",
            "no generator endpoint configured; manual entry is the only path",
        )
    body = {"step_kind": request.step_kind.value, "context": request.context}
    try:
        with httpx.Client(transport=transport, timeout=config.generator_timeout) as client:
            response = client.post(config.generator_url, json=body)
    except httpx.TimeoutException as exc:
        raise GeneratorError(
            "timeout", f"generator did not answer within {config.generator_timeout}s"
        ) from exc
    except httpx.HTTPError as exc:
        raise GeneratorError("remote_error", f"generator request failed: {exc}") from exc
    if response.status_code >= 400:
        excerpt = response.text[:200]
        raise GeneratorError(
            "remote_error", f"generator returned {response.status_code}: {excerpt}"
        )
    try:
        payload = response.json()
    except ValueError as exc:
        raise GeneratorError("remote_error", "generator returned a non-JSON body") from exc
    if "candidate_text" not in payload:
        raise GeneratorError("remote_error", "generator response lacks candidate_text")
    return GeneratorResponse(
        candidate_text=str(payload["candidate_text"]),
        metadata=payload.get("metadata", {}),
    )
