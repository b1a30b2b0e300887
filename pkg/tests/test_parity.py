"""The CLI and HTTP paths drive identical orchestrator logic."""

from __future__ import annotations

import json
import time

from fastapi.testclient import TestClient

from oneeval.cli import main
from oneeval.service import create_app

from test_cli import cli_args
from test_pipeline import CASE_STUDY_REQUEST, make_config


def test_cli_and_http_produce_identical_reports(repo_root, tmp_path):
    cli_dir = tmp_path / "cli"
    http_dir = tmp_path / "http"

    assert main(cli_args(repo_root, cli_dir, "--run-id", "parity", "--model-id", "mock-model", "run", CASE_STUDY_REQUEST)) == 0
    cli_report = json.loads((cli_dir / "runs" / "parity" / "report.json").read_text())

    app = create_app(lambda: make_config(repo_root, http_dir, runs_root=http_dir / "runs", cache_root=http_dir / "cache"))
    with TestClient(app) as client:
        run_id = client.post(
            "/api/runs", json={"request_text": CASE_STUDY_REQUEST, "options": {"run_id": "parity"}}
        ).json()["run_id"]
        deadline = time.monotonic() + 30
        while time.monotonic() < deadline:
            state = client.get(f"/api/runs/{run_id}").json()
            if state["status"] in ("completed", "failed"):
                break
            time.sleep(0.05)
        assert state["status"] == "completed"
        http_report = client.get(f"/api/runs/{run_id}/report", params={"format": "json"}).json()

    # wall-clock start differs between the two runs; everything else must match
    cli_report["metadata"].pop("started_at")
    http_report["metadata"].pop("started_at")
    assert cli_report == http_report
