"""Answer equivalence verdicts and final-answer extraction from model prose."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from .ast import Expr, add, neg
from .parser import ParseError, parse_expr, preprocess_answer
from .simplify import EvalDomainError, eval_expr, normalize_info

SAMPLING_SEED = 3517177
SAMPLE_COUNT = 8
DEFAULT_TOL = 1e-6

# stage names, in escalation order
STAGE_STRING = "string"
STAGE_CANONICAL = "canonical"
STAGE_SAMPLING = "sampling"


@dataclass(frozen=True)
class EquivalenceResult:
    verdict: str  # equivalent | different | unparseable
    stage: str | None  # which stage decided an `equivalent` verdict


def _string_normal(text: str) -> str:
    return re.sub(r"\s+", " ", preprocess_answer(text)).casefold().strip()


def _parse_comparable(text: str) -> Expr:
    """Parse, rewriting a single-equation input as (lhs - rhs)."""
    stripped = preprocess_answer(text)
    if stripped.count("=") == 1:
        lhs_text, rhs_text = stripped.split("=")
        lhs, rhs = parse_expr(lhs_text), parse_expr(rhs_text)
        rhs_neg = neg(rhs)
        return add(lhs, rhs_neg)
    return parse_expr(stripped)


def _sample_value(rng: random.Random) -> float:
    # uniform over [-3, -0.1] U [0.1, 3]: dodges poles and the x=0 convention points
    u = rng.uniform(0.0, 5.8)
    return -3.0 + u if u < 2.9 else 0.1 + (u - 2.9)


def _sampling_agrees(a: Expr, b: Expr, tol: float) -> bool:
    symbols = sorted(a.free_symbols() | b.free_symbols())
    rng = random.Random(SAMPLING_SEED)
    usable = 0
    for _ in range(SAMPLE_COUNT):
        env = {name: _sample_value(rng) for name in symbols}
        try:
            va = eval_expr(a, env)
            vb = eval_expr(b, env)
        except EvalDomainError:
            continue
        usable += 1
        if abs(va - vb) > tol * max(1.0, abs(va), abs(vb)):
            return False
    return usable > 0


def equivalence_details(a_text: str, b_text: str, tol: float = DEFAULT_TOL) -> EquivalenceResult:
    """Three-stage check: normalized string, canonical AST, numeric sampling."""
    if _string_normal(a_text) == _string_normal(b_text) and _string_normal(a_text):
        return EquivalenceResult("equivalent", STAGE_STRING)
    try:
        a = _parse_comparable(a_text)
        b = _parse_comparable(b_text)
    except ParseError:
        return EquivalenceResult("unparseable", None)
    norm_a, _ = normalize_info(a)
    norm_b, _ = normalize_info(b)
    if norm_a == norm_b:
        return EquivalenceResult("equivalent", STAGE_CANONICAL)
    if _sampling_agrees(norm_a, norm_b, tol):
        return EquivalenceResult("equivalent", STAGE_SAMPLING)
    return EquivalenceResult("different", None)


def equivalent(a_text: str, b_text: str, tol: float = DEFAULT_TOL) -> str:
    """Verdict in {equivalent, different, unparseable}."""
    return equivalence_details(a_text, b_text, tol).verdict


# ---------------------------------------------------------------------------
# Final-answer extraction
# ---------------------------------------------------------------------------

_MARKERS = ("final answer", "the answer is", "answer:", "####")
_NUMBER_RE = re.compile(r"[-+]?\d[\d,]*(?:\.\d+)?%?")


def _last_boxed(text: str) -> str | None:
    start = text.rfind("\\boxed")
    while start != -1:
        i = start + len("\\boxed")
        while i < len(text) and text[i].isspace():
            i += 1
        if i < len(text) and text[i] == "{":
            depth = 1
            j = i + 1
            while j < len(text):
                if text[j] == "{":
                    depth += 1
                elif text[j] == "}":
                    depth -= 1
                    if depth == 0:
                        return text[i + 1 : j].strip()
                j += 1
        start = text.rfind("\\boxed", 0, start)
    return None


def _after_last_marker(text: str) -> str | None:
    lowered = text.casefold()
    best = -1
    best_end = -1
    for marker in _MARKERS:
        pos = lowered.rfind(marker)
        if pos > best:
            best = pos
            best_end = pos + len(marker)
    if best == -1:
        return None
    tail = text[best_end:]
    line = tail.splitlines()[0] if tail.splitlines() else ""
    line = line.strip().lstrip(":=").strip()
    if line.lower().startswith("is "):
        line = line[3:].strip()
    line = line.rstrip(".,;: ")
    return line or None


def extract_final_answer(text: str) -> list[str]:
    """Ordered answer candidates: last boxed, last marker tail, last number."""
    candidates: list[str] = []
    boxed = _last_boxed(text)
    if boxed:
        candidates.append(boxed)
    marker = _after_last_marker(text)
    if marker:
        candidates.append(marker)
    numbers = _NUMBER_RE.findall(text)
    if numbers:
        candidates.append(numbers[-1])
    deduped: list[str] = []
    for c in candidates:
        if c not in deduped:
            deduped.append(c)
    return deduped
