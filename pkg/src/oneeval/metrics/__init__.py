"""Decentralized metric registry, dispatcher, recommender, and runner."""

from .registry import MetricDescriptor, MetricRegistry, default_registry, metric, render_registry_doc
from .builtin import compute_gini, smoothed_bleu4, code_tokens, analyze_failures
from .recommend import DISPATCH_TABLE, dispatch_rules, recommend_metrics
from .runner import run_metrics

__all__ = [
    "MetricDescriptor", "MetricRegistry", "default_registry", "metric", "render_registry_doc",
    "compute_gini", "smoothed_bleu4", "code_tokens", "analyze_failures",
    "DISPATCH_TABLE", "dispatch_rules", "recommend_metrics",
    "run_metrics",
]
