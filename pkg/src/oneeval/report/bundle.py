"""Report bundle: the single data source both renderings are generated from."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional


@dataclass
class LengthStats:
    mean: float
    median: float
    p90: float
    count: int

    def to_dict(self) -> dict[str, Any]:
        return {"mean": self.mean, "median": self.median, "p90": self.p90, "count": self.count}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "LengthStats":
        return cls(mean=float(d["mean"]), median=float(d["median"]), p90=float(d["p90"]), count=int(d["count"]))


@dataclass
class ReportBundle:
    """Chart-ready data series; chart drawing consumes these verbatim."""

    radar: dict[str, float]
    sunburst: list[dict[str, Any]]  # [{category, benchmarks: [{benchmark, metrics: [{metric, score, priority}]}]}]
    error_histogram: dict[str, int]
    analyst_cases: list[dict[str, Any]]
    blind_spots: list[dict[str, Any]]  # [{token, count, examples: ["bench#idx", ...]}]
    length_correct: Optional[LengthStats]
    length_incorrect: Optional[LengthStats]
    capability_balance: dict[str, Any]  # {gini, detail}
    micro: list[dict[str, Any]]  # case rows for failures
    metadata: dict[str, Any]  # run_id, model_id, started_at, token_usage

    def to_dict(self) -> dict[str, Any]:
        return {
            "macro": {"radar": dict(self.radar), "sunburst": self.sunburst},
            "diagnostic": {
                "error_histogram": dict(self.error_histogram),
                "analyst_cases": self.analyst_cases,
                "blind_spots": self.blind_spots,
                "length_stats": {
                    "correct": self.length_correct.to_dict() if self.length_correct else None,
                    "incorrect": self.length_incorrect.to_dict() if self.length_incorrect else None,
                },
                "capability_balance": dict(self.capability_balance),
            },
            "micro": self.micro,
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ReportBundle":
        length = d["diagnostic"]["length_stats"]
        return cls(
            radar=dict(d["macro"]["radar"]),
            sunburst=list(d["macro"]["sunburst"]),
            error_histogram=dict(d["diagnostic"]["error_histogram"]),
            analyst_cases=list(d["diagnostic"]["analyst_cases"]),
            blind_spots=list(d["diagnostic"]["blind_spots"]),
            length_correct=LengthStats.from_dict(length["correct"]) if length.get("correct") else None,
            length_incorrect=LengthStats.from_dict(length["incorrect"]) if length.get("incorrect") else None,
            capability_balance=dict(d["diagnostic"]["capability_balance"]),
            micro=list(d["micro"]),
            metadata=dict(d["metadata"]),
        )
