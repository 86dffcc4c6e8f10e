"""HTTP session API over the shared engine.

Every response is an envelope: {"ok": true, "data": ...} on success,
{"ok": false, "error": {code, message, field_path}} on failure, with the
same error codes the core raises, so clients see exactly what a CLI user
would. Bodies are JSON; a malformed body maps to code "bad_request".
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request, Response

from .config import Config, load_config, store_path
from .errors import ProtocolError, StorageError
from .ledger import Store
from .service import Engine

# Codes that indicate a missing referent rather than a bad field.
_NOT_FOUND = {"unknown_session", "unknown_prediction", "unknown_record"}


def _ok(data) -> dict:
    return {"ok": True, "data": data}


def _fail(error: ProtocolError) -> dict:
    return {"ok": False, "error": error.to_dict()}


def _status_for(error: ProtocolError) -> int:
    if isinstance(error, StorageError):
        return 500 if error.code == "storage_failure" else 409
    if error.code in _NOT_FOUND:
        return 404
    return 400


async def _body(request: Request) -> dict:
    raw = await request.body()
    if not raw:
        return {}
    try:
        parsed = json.loads(raw)
    except ValueError:
        raise ProtocolError("bad_request", "request body is not valid JSON")
    if not isinstance(parsed, dict):
        raise ProtocolError("bad_request", "request body must be a JSON object")
    return parsed


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="protorail", docs_url=None, redoc_url=None)

    @app.exception_handler(ProtocolError)
    async def protocol_error_handler(request: Request, error: ProtocolError):
        return Response(
            content=json.dumps(_fail(error)),
            status_code=_status_for(error),
            media_type="application/json",
        )

    @app.get("/health")
    async def health():
        return _ok({"status": "up"})

    @app.post("/sessions")
    async def create_session(request: Request):
        return _ok(engine.create_session(await _body(request)))

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        return _ok(engine.get_session(session_id))

    @app.post("/sessions/{session_id}/steps/{step_name}")
    async def apply_step(session_id: str, step_name: str, request: Request):
        return _ok(engine.apply_step(session_id, step_name, await _body(request)))

    @app.get("/sessions/{session_id}/gates")
    async def gates(session_id: str):
        return _ok(engine.gates(session_id))

    @app.get("/themes/{theme_key}/history/diff")
    async def history_diff(theme_key: str):
        return _ok(engine.history_diff(theme_key))

    @app.post("/predictions")
    async def add_prediction(request: Request):
        return _ok(engine.add_prediction(await _body(request)))

    @app.post("/predictions/{prediction_id}/evaluation")
    async def evaluate(prediction_id: str, request: Request):
        return _ok(engine.evaluate_prediction(prediction_id, await _body(request)))

    @app.post("/rubric")
    async def rubric(request: Request):
        return _ok(engine.rubric(await _body(request)))

    return app


def default_app(config: Config | None = None) -> FastAPI:
    """App wired from environment variables (store path, config file)."""
    cfg = config or load_config()
    return create_app(Engine(Store(store_path()), cfg))


def serve(port: int, config: Config | None = None) -> None:  # pragma: no cover
    import uvicorn

    uvicorn.run(default_app(config), host="127.0.0.1", port=port)
