"""HTTP API over the pipeline: run creation, polling, decisions, rollback,
evidence pagination, and report retrieval.

The service and the CLI drive the identical orchestrator code; per-run
mutations serialize through each run's single-writer lock.
"""

from __future__ import annotations

import logging
import threading
from pathlib import Path
from typing import Any, Callable, Optional

from fastapi import FastAPI, HTTPException, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import StateError
from .pipeline import PipelineConfig, PipelineRun
from .report import render
from .report.render import parse_report_json

logger = logging.getLogger(__name__)


class CreateRunRequest(BaseModel):
    request_text: str
    options: dict[str, Any] = Field(default_factory=dict)


class DecisionRequest(BaseModel):
    decision: str
    payload: dict[str, Any] = Field(default_factory=dict)


class RunStore:
    def __init__(self):
        self._runs: dict[str, PipelineRun] = {}
        self._lock = threading.Lock()

    def add(self, run: PipelineRun) -> None:
        with self._lock:
            self._runs[run.state.run_id] = run

    def get(self, run_id: str) -> PipelineRun:
        with self._lock:
            run = self._runs.get(run_id)
        if run is None:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")
        return run


def _error_response(status: int, error: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": error, "detail": detail})


def create_app(config_factory: Callable[[], PipelineConfig], ui_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="oneeval", version="0.1.0")
    store = RunStore()
    app.state.store = store

    @app.exception_handler(HTTPException)
    async def http_error(_, exc: HTTPException):
        return _error_response(exc.status_code, "http_error", str(exc.detail))

    @app.post("/api/runs", status_code=202)
    def create_run(body: CreateRunRequest):
        config = config_factory()
        options = body.options
        if "auto_approve" in options:
            config.auto_approve = bool(options["auto_approve"])
        if "max_samples" in options:
            config.max_samples = int(options["max_samples"])
        if "stop_after" in options:
            config.stop_after = options["stop_after"]
        run = PipelineRun(config, body.request_text, run_id=options.get("run_id"))
        store.add(run)
        thread = threading.Thread(target=run.advance, daemon=True, name=f"run-{run.state.run_id}")
        thread.start()
        return {"run_id": run.state.run_id}

    @app.get("/api/runs/{run_id}")
    def get_run(run_id: str):
        run = store.get(run_id)
        with run.lock:
            return run.state.to_dict()

    @app.get("/api/runs/{run_id}/evidence")
    def get_evidence(run_id: str, after: int = -1):
        run = store.get(run_id)
        records = run.evidence.after(after)
        return {"records": [r.to_dict() for r in records], "next_after": records[-1].index if records else after}

    @app.post("/api/runs/{run_id}/checkpoints/{checkpoint_id}/decision")
    def decide(run_id: str, checkpoint_id: str, body: DecisionRequest):
        run = store.get(run_id)
        try:
            state = run.checkpoint_decide(checkpoint_id, body.decision, body.payload)
        except StateError as exc:
            return _error_response(409, "conflict", str(exc))
        except (ValueError, KeyError) as exc:
            return _error_response(400, "bad_request", str(exc))
        return state.to_dict()

    @app.post("/api/runs/{run_id}/rollback/{checkpoint_id}")
    def rollback(run_id: str, checkpoint_id: str):
        run = store.get(run_id)
        try:
            state = run.rollback(checkpoint_id)
        except StateError as exc:
            return _error_response(409, "conflict", str(exc))
        return state.to_dict()

    @app.get("/api/runs/{run_id}/report")
    def report(run_id: str, format: str = "json"):
        run = store.get(run_id)
        if run.state.report_ref is None or not Path(run.state.report_ref).exists():
            return _error_response(404, "not_found", f"run {run_id} has no report (status {run.state.status.value})")
        bundle = parse_report_json(Path(run.state.report_ref).read_text(encoding="utf-8"))
        if format == "markdown":
            return Response(content=render(bundle, "markdown"), media_type="text/markdown")
        return JSONResponse(content=bundle.to_dict())

    @app.get("/api/gallery")
    def gallery():
        config = config_factory()
        return {"entries": [e.to_dict() for e in config.gallery]}

    if ui_dir and Path(ui_dir).exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
