"""Generated documentation stays in sync with the code."""

from __future__ import annotations

from oneeval.metrics import render_registry_doc


def test_metrics_doc_in_sync(repo_root):
    committed = (repo_root / "docs" / "metrics.md").read_text(encoding="utf-8")
    assert committed == render_registry_doc(), "regenerate with: python3 -m oneeval.metrics.doc"


def test_api_schemas_parse(repo_root):
    import json

    schema_dir = repo_root / "docs" / "api"
    names = {p.name for p in schema_dir.glob("*.schema.json")}
    assert {"run_state.schema.json", "report_bundle.schema.json", "evidence_page.schema.json"} <= names
    for path in schema_dir.glob("*.schema.json"):
        json.loads(path.read_text(encoding="utf-8"))
