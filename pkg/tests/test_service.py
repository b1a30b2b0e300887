"""HTTP API: lifecycle, decisions, rollback, evidence, schema conformance."""

from __future__ import annotations

import json
import time
from pathlib import Path

import jsonschema
import pytest
from fastapi.testclient import TestClient

from oneeval.service import create_app

from test_pipeline import CASE_STUDY_REQUEST, make_config

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "docs" / "api"


def schema(name):
    return json.loads((SCHEMA_DIR / name).read_text())


@pytest.fixture()
def client(repo_root, tmp_path):
    app = create_app(lambda: make_config(repo_root, tmp_path))
    with TestClient(app) as test_client:
        yield test_client


def wait_for(client, run_id, predicate, timeout=30.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        state = client.get(f"/api/runs/{run_id}").json()
        if predicate(state):
            return state
        time.sleep(0.05)
    raise AssertionError(f"run {run_id} never satisfied the predicate; last state: {state['status']}")


class TestLifecycle:
    def test_create_poll_complete(self, client):
        response = client.post("/api/runs", json={"request_text": CASE_STUDY_REQUEST, "options": {}})
        assert response.status_code == 202
        jsonschema.validate(response.json(), schema("create_run.schema.json"))
        run_id = response.json()["run_id"]
        state = wait_for(client, run_id, lambda s: s["status"] in ("completed", "failed"))
        assert state["status"] == "completed"
        jsonschema.validate(state, schema("run_state.schema.json"))

    def test_interactive_pauses_then_decision_advances(self, client):
        response = client.post("/api/runs", json={"request_text": CASE_STUDY_REQUEST, "options": {"auto_approve": False}})
        run_id = response.json()["run_id"]
        state = wait_for(client, run_id, lambda s: s["status"] == "awaiting_decision")
        assert state["step_index"] == 4
        checkpoint = next(c for c in state["checkpoints"] if c["decision"] == "pending")
        decided = client.post(
            f"/api/runs/{run_id}/checkpoints/{checkpoint['checkpoint_id']}/decision",
            json={"decision": "approved", "payload": {}},
        )
        assert decided.status_code == 200
        assert decided.json()["step_index"] >= 5
        jsonschema.validate(decided.json(), schema("run_state.schema.json"))

    def test_unknown_run_404(self, client):
        response = client.get("/api/runs/nope")
        assert response.status_code == 404
        jsonschema.validate(response.json(), schema("error.schema.json"))

    def test_decision_on_completed_run_409(self, client):
        response = client.post("/api/runs", json={"request_text": CASE_STUDY_REQUEST, "options": {}})
        run_id = response.json()["run_id"]
        state = wait_for(client, run_id, lambda s: s["status"] == "completed")
        checkpoint_id = state["checkpoints"][0]["checkpoint_id"]
        conflict = client.post(
            f"/api/runs/{run_id}/checkpoints/{checkpoint_id}/decision",
            json={"decision": "approved", "payload": {}},
        )
        assert conflict.status_code == 409
        jsonschema.validate(conflict.json(), schema("error.schema.json"))


class TestEvidenceAndReport:
    def test_evidence_pagination(self, client):
        run_id = client.post("/api/runs", json={"request_text": CASE_STUDY_REQUEST, "options": {}}).json()["run_id"]
        wait_for(client, run_id, lambda s: s["status"] == "completed")
        page = client.get(f"/api/runs/{run_id}/evidence", params={"after": -1}).json()
        jsonschema.validate(page, schema("evidence_page.schema.json"))
        assert page["records"][0]["index"] == 0
        cursor = page["records"][4]["index"]
        rest = client.get(f"/api/runs/{run_id}/evidence", params={"after": cursor}).json()
        assert all(r["index"] > cursor for r in rest["records"])

    def test_report_json_and_markdown(self, client):
        run_id = client.post("/api/runs", json={"request_text": CASE_STUDY_REQUEST, "options": {}}).json()["run_id"]
        wait_for(client, run_id, lambda s: s["status"] == "completed")
        report = client.get(f"/api/runs/{run_id}/report", params={"format": "json"})
        assert report.status_code == 200
        jsonschema.validate(report.json(), schema("report_bundle.schema.json"))
        markdown = client.get(f"/api/runs/{run_id}/report", params={"format": "markdown"})
        assert markdown.status_code == 200
        assert markdown.text.startswith("# Evaluation report")

    def test_report_absent_before_completion(self, client):
        run_id = client.post(
            "/api/runs", json={"request_text": CASE_STUDY_REQUEST, "options": {"auto_approve": False}}
        ).json()["run_id"]
        wait_for(client, run_id, lambda s: s["status"] == "awaiting_decision")
        response = client.get(f"/api/runs/{run_id}/report")
        assert response.status_code == 404


class TestConcurrentRuns:
    def test_two_runs_execute_concurrently_with_isolated_state(self, client):
        first = client.post("/api/runs", json={"request_text": CASE_STUDY_REQUEST, "options": {"run_id": "conc-a"}})
        second = client.post("/api/runs", json={"request_text": CASE_STUDY_REQUEST, "options": {"run_id": "conc-b"}})
        assert first.status_code == second.status_code == 202
        state_a = wait_for(client, "conc-a", lambda s: s["status"] in ("completed", "failed"))
        state_b = wait_for(client, "conc-b", lambda s: s["status"] in ("completed", "failed"))
        assert state_a["status"] == state_b["status"] == "completed"
        assert state_a["run_id"] != state_b["run_id"]
        evidence_a = client.get("/api/runs/conc-a/evidence", params={"after": -1}).json()["records"]
        assert all(r["run_id"] == "conc-a" for r in evidence_a)


class TestRollbackAndGallery:
    def test_rollback_endpoint(self, client):
        run_id = client.post("/api/runs", json={"request_text": CASE_STUDY_REQUEST, "options": {}}).json()["run_id"]
        state = wait_for(client, run_id, lambda s: s["status"] == "completed")
        plan_checkpoint = next(c for c in state["checkpoints"] if c["checkpoint_id"].startswith("plan"))
        rolled = client.post(f"/api/runs/{run_id}/rollback/{plan_checkpoint['checkpoint_id']}")
        assert rolled.status_code == 200
        assert rolled.json()["status"] == "awaiting_decision"
        assert rolled.json()["step_index"] == 4
        missing = client.post(f"/api/runs/{run_id}/rollback/plan-999")
        assert missing.status_code == 409

    def test_gallery_endpoint(self, client):
        response = client.get("/api/gallery")
        assert response.status_code == 200
        jsonschema.validate(response.json(), schema("gallery_response.schema.json"))
        ids = {e["id"] for e in response.json()["entries"]}
        assert {"mmlu", "gsm8k", "math-500"} <= ids
