#!/usr/bin/env python3
"""Record API responses from the live service into frontend test fixtures.

Run from the repository root: python3 scripts/record_ui_fixtures.py
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "tests"))

import tempfile

from fastapi.testclient import TestClient

from oneeval.service import create_app
from test_pipeline import CASE_STUDY_REQUEST, make_config

OUT = ROOT / "frontend" / "tests" / "fixtures"


def write(name: str, value) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / name).write_text(json.dumps(value, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def wait(client, run_id, predicate, timeout=30.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        state = client.get(f"/api/runs/{run_id}").json()
        if predicate(state):
            return state
        time.sleep(0.05)
    raise RuntimeError("timed out")


def main() -> None:
    tmp = Path(tempfile.mkdtemp())
    app = create_app(lambda: make_config(ROOT, tmp))
    with TestClient(app) as client:
        run_id = client.post(
            "/api/runs",
            json={"request_text": CASE_STUDY_REQUEST, "options": {"auto_approve": False, "run_id": "ui-fixture"}},
        ).json()["run_id"]
        awaiting = wait(client, run_id, lambda s: s["status"] == "awaiting_decision")
        write("state_plan_checkpoint.json", awaiting)

        checkpoint_id = next(c["checkpoint_id"] for c in awaiting["checkpoints"] if c["decision"] == "pending")
        after_approve = client.post(
            f"/api/runs/{run_id}/checkpoints/{checkpoint_id}/decision",
            json={"decision": "approved", "payload": {}},
        ).json()
        write("state_after_approve.json", after_approve)

        # approve remaining checkpoints until completion
        final_state = after_approve
        while final_state["status"] != "completed":
            final_state = wait(client, run_id, lambda s: s["status"] in ("awaiting_decision", "completed", "failed"))
            if final_state["status"] == "failed":
                raise RuntimeError(f"fixture run failed: {final_state['failure']}")
            if final_state["status"] == "awaiting_decision":
                pending = [c for c in final_state["checkpoints"] if c["decision"] == "pending"]
                final_state = client.post(
                    f"/api/runs/{run_id}/checkpoints/{pending[-1]['checkpoint_id']}/decision",
                    json={"decision": "approved", "payload": {}},
                ).json()
        write("state_completed.json", final_state)

        report = client.get(f"/api/runs/{run_id}/report", params={"format": "json"}).json()
        write("report_bundle.json", report)

        rolled = client.post(f"/api/runs/{run_id}/rollback/{checkpoint_id}").json()
        write("state_rolled_back.json", rolled)

        gallery = client.get("/api/gallery").json()
        write("gallery.json", gallery)

        evidence = client.get(f"/api/runs/{run_id}/evidence", params={"after": -1}).json()
        write("evidence_page.json", {"records": evidence["records"][:10], "next_after": evidence["records"][9]["index"]})

    print(f"recorded fixtures under {OUT}")


if __name__ == "__main__":
    main()
