"""Three-view diagnostic reporting: macro profile, failure diagnostics, cases."""

from .bundle import LengthStats, ReportBundle
from .build import build_bundle, build_diagnostic, build_macro, failed_samples_by_benchmark
from .render import render, write_csv
from .figures import render_figures

__all__ = [
    "LengthStats", "ReportBundle",
    "build_bundle", "build_diagnostic", "build_macro", "failed_samples_by_benchmark",
    "render", "write_csv", "render_figures",
]
