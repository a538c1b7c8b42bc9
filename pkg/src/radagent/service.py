"""HTTP front for case execution.

Requests run through the same runner as the CLI, so the response body
for a completed case is the exact bytes of the report.json the CLI
would write. Handlers are plain functions: the framework runs each on
a worker thread, and every request builds its own gateway, so
concurrent cases stay isolated (shared state is the parsed config
only).
"""
from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .agent.types import Query
from .config import EngineConfig
from .errors import RadAgentError, UnknownCaseError
from .runner import execute_case
from .volume.nifti import parse_nifti

REQUIRED_FIELDS = ("case_id", "query", "organ", "volume_ref")

# terminal statuses that are not "completed", mapped to HTTP codes
_STATUS_CODES = {"time-budget": 504, "step-cap": 500, "aborted": 500}


def _error(status: int, kind: str, detail: str) -> JSONResponse:
    return JSONResponse(
        {"error": {"kind": kind, "detail": detail}}, status_code=status
    )


def _resolve_volume(config: EngineConfig, case_id: str, ref: str) -> Path:
    """volume_ref is a filesystem path; relative paths live in the
    case's directory inside the segmentation store."""
    p = Path(ref)
    if p.is_absolute():
        return p
    return Path(config.segmentation.store) / case_id / p


def create_app(config: EngineConfig) -> FastAPI:
    app = FastAPI(title="radagent", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    def _malformed(request: Request, exc: RequestValidationError) -> JSONResponse:
        return _error(400, "bad-request", "body must be a JSON object")

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/v1/report")
    def report(payload: dict) -> Response:
        for key in REQUIRED_FIELDS:
            value = payload.get(key)
            if not isinstance(value, str) or not value:
                return _error(400, "bad-request", f"body needs a string {key!r}")
        unknown = set(payload) - set(REQUIRED_FIELDS)
        if unknown:
            return _error(400, "bad-request", f"unknown field(s) {sorted(unknown)}")

        case_id = payload["case_id"]
        store = config.segmentation.store
        if store is None or not (Path(store) / case_id).is_dir():
            return _error(
                404, "unknown-case", f"case {case_id!r} is not in the segmentation store"
            )
        volume_path = _resolve_volume(config, case_id, payload["volume_ref"])
        if not volume_path.is_file():
            return _error(
                404, "unknown-volume", f"volume {payload['volume_ref']!r} not found"
            )

        query = Query(text=payload["query"], case_id=case_id, organ=payload["organ"])
        try:
            volume = parse_nifti(volume_path)
            outcome = execute_case(config, query, volume)
        except UnknownCaseError as exc:
            return _error(404, "unknown-case", str(exc))
        except RadAgentError as exc:
            return _error(500, "aborted", str(exc))

        if outcome.terminal_status == "completed":
            # the exact bytes the CLI writes for this case
            return Response(
                content=outcome.report_path.read_bytes(),
                media_type="application/json",
            )
        return _error(
            _STATUS_CODES[outcome.terminal_status],
            outcome.terminal_status,
            f"case ended with terminal status {outcome.terminal_status!r}",
        )

    return app
