"""Command-line interface.

Subcommands: plan, run, resolve, score, report, bench-success, serve.
Exit codes: 0 ok, 2 intent failure, 3 plan failure, 4 resolution failure,
5 scoring/recommendation failure, 64 usage.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import Optional

from .errors import OneEvalError, StateError
from .gallery import load_gallery
from .hub import HubClient
from .llm import client_from_spec
from .metrics import default_registry, recommend_metrics, run_metrics
from .model import BenchInfo, MatchTier, PlanItem, PlanSource, RunPaths, SampleRecord
from .nl2bench import RetrievalConfig
from .pipeline import (
    FAILURE_EXIT_CODES,
    PipelineConfig,
    PipelineRun,
    compute_success_metrics,
    run_pipeline,
    run_success_batch,
)
from .report import render, render_figures, write_csv
from .report.render import parse_report_json
from .resolve import resolve_benchmark
from .hub import load_cached_rows
from .resolve import normalize_rows

logger = logging.getLogger(__name__)

USAGE_EXIT = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(USAGE_EXIT)


def build_parser() -> _Parser:
    parser = _Parser(prog="oneeval", description="Agentic evaluation orchestration")
    parser.add_argument("--gallery", default="gallery/benchmarks.json", help="gallery JSON path")
    parser.add_argument("--llm", default=None, help="planner/judge endpoint URL or mock:<script-path>")
    parser.add_argument("--model", default=None, help="subject model endpoint URL or mock:<script-path>")
    parser.add_argument("--hub", default=None, help="hub base URL or offline:<fixture-dir>")
    parser.add_argument("--cache", default="cache", help="dataset cache directory")
    parser.add_argument("--out", default="runs", help="run output directory")
    parser.add_argument("--interactive", action="store_true", help="pause at checkpoints for decisions")
    parser.add_argument("--max-samples", type=int, default=50, help="per-benchmark sample cap")
    parser.add_argument("--seed", type=int, default=None, help="seed for run-id generation")
    parser.add_argument("--run-id", default=None, help="explicit run id (reproducible layout)")
    parser.add_argument("--retriever", choices=["tfidf", "embedding"], default="tfidf")
    parser.add_argument("--model-id", default="subject-model", help="label for the model under evaluation")

    sub = parser.add_subparsers(dest="command", required=True)

    plan_cmd = sub.add_parser("plan", help="steps 1-4: print the benchmark plan")
    plan_cmd.add_argument("request")

    run_cmd = sub.add_parser("run", help="full pipeline")
    run_cmd.add_argument("request")

    resolve_cmd = sub.add_parser("resolve", help="resolve a benchmark name to a repository id")
    resolve_cmd.add_argument("name")

    score_cmd = sub.add_parser("score", help="score a prediction file against a BenchInfo")
    score_cmd.add_argument("--bench", required=True, help="benchinfo.json path")
    score_cmd.add_argument("--pred", required=True, help="JSONL with one {\"prediction\": ...} per row")

    report_cmd = sub.add_parser("report", help="render the report bundle for a run")
    report_cmd.add_argument("run_id")
    report_cmd.add_argument("--format", choices=["json", "markdown"], default="markdown")

    bench_cmd = sub.add_parser("bench-success", help="batch harness: cumulative success rates")
    bench_cmd.add_argument("--requests", required=True, help="text file, one request per line")

    serve_cmd = sub.add_parser("serve", help="HTTP API (and UI when built)")
    serve_cmd.add_argument("--port", type=int, default=8710)

    return parser


def _hub_client(args) -> HubClient:
    if args.hub and args.hub.startswith("offline:"):
        return HubClient(offline_dir=args.hub[len("offline:"):])
    return HubClient(base_url=args.hub)


def build_config(args) -> PipelineConfig:
    gallery = load_gallery(args.gallery)
    run_kwargs = dict(
        gallery=gallery,
        hub=_hub_client(args),
        llm=client_from_spec(args.llm, "llm"),
        model=client_from_spec(args.model, "model"),
        retrieval=RetrievalConfig(backend=args.retriever),
        runs_root=Path(args.out),
        cache_root=Path(args.cache),
        auto_approve=not args.interactive,
        max_samples=args.max_samples,
        model_id=args.model_id,
    )
    return PipelineConfig(**run_kwargs)


def _run_id(args) -> Optional[str]:
    if args.run_id:
        return args.run_id
    if args.seed is not None:
        return f"run-{random.Random(args.seed).getrandbits(48):012x}"
    return None


def _print_state_summary(run: PipelineRun) -> None:
    state = run.state
    print(json.dumps({
        "run_id": state.run_id,
        "status": state.status.value,
        "step_index": state.step_index,
        "failure": state.failure,
        "token_usage": state.token_usage,
        "report": state.report_ref,
    }, indent=2))


def _exit_code(run: PipelineRun) -> int:
    if run.state.failure:
        return FAILURE_EXIT_CODES.get(run.state.failure, 1)
    return 0


def _interactive_loop(run: PipelineRun) -> None:
    from .model import RunStatus

    while run.state.status is RunStatus.AWAITING_DECISION:
        checkpoint = run.pending_checkpoint()
        print(f"\n-- checkpoint {checkpoint.checkpoint_id} (step {checkpoint.step_index}) --")
        if run.state.plan:
            for item in run.state.plan.items:
                print(f"  {item.display_name:24s} {item.match_tier.value:8s} {item.relevance_score:.2f}  {item.justification}")
        choice = input("[a]pprove / [r]efine <text> / [b] rollback <ckpt> / [q]uit: ").strip()
        try:
            if choice.startswith("a") or not choice:
                run.checkpoint_decide(checkpoint.checkpoint_id, "approved")
            elif choice.startswith("r "):
                run.checkpoint_decide(checkpoint.checkpoint_id, "refined", {"request_text": choice[2:]})
            elif choice.startswith("b "):
                run.rollback(choice[2:].strip())
            elif choice.startswith("q"):
                return
        except StateError as exc:
            print(f"error: {exc}")


def cmd_plan(args) -> int:
    config = build_config(args)
    config.stop_after = "plan"
    run = run_pipeline(args.request, config, run_id=_run_id(args))
    if run.state.failure:
        _print_state_summary(run)
        return _exit_code(run)
    print(json.dumps(run.state.plan.to_dict(), indent=2, ensure_ascii=False))
    return 0


def cmd_run(args) -> int:
    config = build_config(args)
    run = run_pipeline(args.request, config, run_id=_run_id(args))
    if args.interactive:
        _interactive_loop(run)
    _print_state_summary(run)
    return _exit_code(run)


def cmd_resolve(args) -> int:
    config = build_config(args)
    item = PlanItem(
        display_name=args.name,
        canonical_id=None,
        source=PlanSource.USER,
        relevance_score=1.0,
        match_tier=MatchTier.FORCED,
    )
    resolved = resolve_benchmark(item, config.gallery, config.hub)
    print(json.dumps({
        "name": args.name,
        "canonical_id": resolved.repo_id,
        "provenance": resolved.provenance,
        "revision": resolved.card.revision,
    }, indent=2))
    return 0


def cmd_score(args) -> int:
    info = BenchInfo.from_dict(json.loads(Path(args.bench).read_text(encoding="utf-8")))
    rows = load_cached_rows(info.cache_path)
    normalized = normalize_rows(info, rows)
    predictions = []
    with open(args.pred, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                value = json.loads(line)
                predictions.append(value["prediction"] if isinstance(value, dict) else str(value))
    n = min(len(predictions), len(normalized))
    samples = [
        SampleRecord(index=row["index"], input=row["input"], prediction=pred, references=row["references"])
        for row, pred in zip(normalized[:n], predictions[:n])
    ]
    registry = default_registry()
    plan = recommend_metrics(info, {}, llm=None, registry=registry)
    outcomes = run_metrics(plan, samples, registry=registry)
    print(json.dumps({
        "benchmark_id": info.benchmark_id,
        "samples": len(samples),
        "provenance": plan.provenance,
        "outcomes": [o.to_dict() for o in outcomes],
    }, indent=2))
    return 0


def cmd_report(args) -> int:
    paths = RunPaths(Path(args.out), args.run_id)
    if not paths.report_json_path.exists():
        sys.stderr.write(f"error: no report for run {args.run_id} under {args.out}\n")
        return 1
    bundle = parse_report_json(paths.report_json_path.read_text(encoding="utf-8"))
    paths.report_md_path.write_text(render(bundle, "markdown"), encoding="utf-8")
    paths.report_csv_path.write_text(write_csv(bundle), encoding="utf-8")
    figures = render_figures(bundle, paths.figures_dir)
    if args.format == "json":
        print(render(bundle, "json"))
    else:
        print(render(bundle, "markdown"))
    sys.stderr.write(f"figures: {', '.join(str(f) for f in figures)}\n")
    sys.stderr.write(f"scores: {paths.report_csv_path}\n")
    return 0


def cmd_bench_success(args) -> int:
    requests = [
        line.strip()
        for line in Path(args.requests).read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.startswith("#")
    ]
    outcomes, rates = run_success_batch(requests, lambda: build_config(args))
    out_path = Path(args.out) / "bench-success-outcomes.json"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps(outcomes, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"plan_executable_rate {rates['plan_executable_rate']:.4f}")
    print(f"auto_complete_rate {rates['auto_complete_rate']:.4f}")
    print(f"full_plan_rate {rates['full_plan_rate']:.4f}")
    print(f"avg_tokens {rates['avg_tokens']:.1f}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    ui_dir = Path("frontend/dist")
    app = create_app(lambda: build_config(args), ui_dir=ui_dir if ui_dir.exists() else None)
    uvicorn.run(app, host="127.0.0.1", port=args.port)
    return 0


_COMMANDS = {
    "plan": cmd_plan,
    "run": cmd_run,
    "resolve": cmd_resolve,
    "score": cmd_score,
    "report": cmd_report,
    "bench-success": cmd_bench_success,
    "serve": cmd_serve,
}


def main(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else USAGE_EXIT
    try:
        return _COMMANDS[args.command](args)
    except OneEvalError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
