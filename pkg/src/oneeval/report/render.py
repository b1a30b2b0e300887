"""Render the bundle as canonical JSON, Markdown, and a delimited score table.

Both documents are generated from the same bundle with no recomputation, so
``render(parse(render_json(b)), markdown)`` is byte-identical to
``render(b, markdown)``.
"""

from __future__ import annotations

import csv
import io
import json

from ..model import canonical_json_bytes
from .bundle import ReportBundle

DEFAULT_MAX_CASES = 10


def render(bundle: ReportBundle, format: str = "json", max_cases: int = DEFAULT_MAX_CASES) -> str:
    if format == "json":
        return canonical_json_bytes(bundle.to_dict()).decode("utf-8")
    if format == "markdown":
        return _render_markdown(bundle, max_cases)
    raise ValueError(f"unknown report format {format!r}")


def parse_report_json(text: str) -> ReportBundle:
    return ReportBundle.from_dict(json.loads(text))


def _fmt(value: float) -> str:
    return f"{value:.4f}"


def _render_markdown(bundle: ReportBundle, max_cases: int) -> str:
    meta = bundle.metadata
    lines: list[str] = []
    lines.append(f"# Evaluation report: {meta.get('run_id', 'run')}")
    lines.append("")
    lines.append(f"- Model: `{meta.get('model_id', 'unknown')}`")
    lines.append(f"- Started: {meta.get('started_at', '')}")
    lines.append(f"- Token usage: {meta.get('token_usage', 0)}")
    lines.append("")

    lines.append("## Capability profile")
    lines.append("")
    lines.append("| Category | Score |")
    lines.append("|---|---|")
    for category, score in bundle.radar.items():
        lines.append(f"| {category} | {_fmt(score)} |")
    lines.append("")

    lines.append("### Score tree")
    lines.append("")
    for node in bundle.sunburst:
        lines.append(f"- {node['category']}")
        for bench in node["benchmarks"]:
            lines.append(f"  - {bench['benchmark']}")
            for m in bench["metrics"]:
                lines.append(f"    - {m['metric']}: {_fmt(m['score'])}")
    lines.append("")

    lines.append("## Diagnostics")
    lines.append("")
    balance = bundle.capability_balance
    lines.append(f"- Capability balance (Gini): {_fmt(balance.get('gini', 0.0))} ({balance.get('detail', '')})")
    if bundle.error_histogram:
        lines.append("- Error classes:")
        for cls, count in sorted(bundle.error_histogram.items()):
            lines.append(f"  - {cls}: {count}")
    else:
        lines.append("- Error classes: no failures")
    if bundle.blind_spots:
        lines.append("- Blind spots (frequent tokens in failed inputs):")
        for spot in bundle.blind_spots:
            examples = ", ".join(spot["examples"])
            lines.append(f"  - `{spot['token']}` x{spot['count']} (e.g. {examples})")
    else:
        lines.append("- Blind spots: none")
    lines.append("- Output length (whitespace tokens):")
    if bundle.length_correct:
        c = bundle.length_correct
        lines.append(f"  - correct: mean {_fmt(c.mean)}, median {_fmt(c.median)}, p90 {_fmt(c.p90)} (n={c.count})")
    else:
        lines.append("  - correct: absent")
    if bundle.length_incorrect:
        i = bundle.length_incorrect
        lines.append(f"  - incorrect: mean {_fmt(i.mean)}, median {_fmt(i.median)}, p90 {_fmt(i.p90)} (n={i.count})")
    else:
        lines.append("  - incorrect: absent")
    lines.append("")

    lines.append("## Case inspection")
    lines.append("")
    if not bundle.micro:
        lines.append("No failing cases.")
    else:
        lines.append("| Benchmark | # | Input | Prediction | Reference | Failing metrics |")
        lines.append("|---|---|---|---|---|---|")
        for row in bundle.micro[:max_cases]:
            cells = [
                row["benchmark"],
                str(row["sample_index"]),
                _md_cell(row["input_excerpt"]),
                _md_cell(row["prediction_excerpt"]),
                _md_cell(row["reference_excerpt"]),
                ", ".join(row["failing_metrics"]),
            ]
            lines.append("| " + " | ".join(cells) + " |")
    lines.append("")
    return "\n".join(lines)


def _md_cell(text: str, limit: int = 80) -> str:
    return text[:limit].replace("|", "\\|").replace("\n", " ")


def write_csv(bundle: ReportBundle) -> str:
    """Delimited per-benchmark metric table (one row per sunburst leaf)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["category", "benchmark", "metric", "priority", "score"])
    for node in bundle.sunburst:
        for bench in node["benchmarks"]:
            for m in bench["metrics"]:
                writer.writerow([node["category"], bench["benchmark"], m["metric"], m["priority"], f"{m['score']:.6f}"])
    return buffer.getvalue()
