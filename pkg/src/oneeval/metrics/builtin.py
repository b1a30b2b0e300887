"""Built-in metric implementations.

Sample-scope metrics take ``(sample, params)`` and return ``(value, detail)``
with value in [0, 1].  Report-scope entries (capability balance, judge-based
failure attribution) are registered for enumeration and recommendation but
computed by the reporting stage through the functions exported here.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import re
from collections import Counter
from typing import Optional

from ..exprs import equivalence_details, equivalent, extract_final_answer
from ..model import SampleRecord
from .registry import MetricRegistry, metric

MATH_TOL = 1e-6
REASONING_BUDGET = 256
CC_BUDGET = 10
ANALYST_CLASSES = ("format_error", "extraction_error", "logic_error", "hallucination", "other")


def _norm_text(text: str) -> str:
    return re.sub(r"\s+", " ", text.strip().casefold())


def exact_match(sample: SampleRecord, params: dict) -> tuple[float, str]:
    pred = _norm_text(sample.prediction)
    for ref in sample.references:
        if pred == _norm_text(ref):
            return 1.0, "matched"
    return 0.0, "no reference matched"


def _reference_answers(references: list[str]) -> list[str]:
    """References carrying a #### chain keep only the extracted tail."""
    out = []
    for ref in references:
        if "####" in ref:
            candidates = extract_final_answer(ref)
            out.extend(candidates or [ref])
        else:
            out.append(ref)
    return out


def _answer_candidates(prediction: str) -> list[str]:
    """Extraction candidates plus the raw prediction (covers bare answers)."""
    candidates = extract_final_answer(prediction)
    stripped = prediction.strip()
    if stripped and stripped not in candidates:
        candidates.append(stripped)
    return candidates


def math_verify(sample: SampleRecord, params: dict) -> tuple[float, str]:
    tol = float(params.get("tol", MATH_TOL))
    candidates = _answer_candidates(sample.prediction)
    refs = _reference_answers(sample.references)
    for cand in candidates:
        for ref in refs:
            if equivalent(cand, ref, tol) == "equivalent":
                return 1.0, f"{cand!r} equivalent to {ref!r}"
    return 0.0, f"candidates {candidates!r} not equivalent to any reference"


def symbolic_match(sample: SampleRecord, params: dict) -> tuple[float, str]:
    tol = float(params.get("tol", MATH_TOL))
    candidates = _answer_candidates(sample.prediction)
    refs = _reference_answers(sample.references)
    for cand in candidates:
        for ref in refs:
            details = equivalence_details(cand, ref, tol)
            if details.verdict == "equivalent" and details.stage in ("string", "canonical"):
                return 1.0, f"canonical equivalence via {details.stage}"
    return 0.0, "no canonical equivalence"


# ---------------------------------------------------------------------------
# Code metrics
# ---------------------------------------------------------------------------

def code_tokens(text: str) -> list[str]:
    """Identifier/number runs plus every operator or punctuation character."""
    return re.findall(r"\w+|[^\w\s]", text)


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def smoothed_bleu4(candidate: list[str], references: list[list[str]]) -> float:
    """BLEU-4 with add-one smoothing on the n>=2 precisions.

    Unigram precision stays unsmoothed so fully disjoint snippets score 0.
    """
    if not candidate:
        return 1.0 if all(not r for r in references) else 0.0
    log_sum = 0.0
    for n in range(1, 5):
        counts = _ngrams(candidate, n)
        total = sum(counts.values())
        max_counts: Counter = Counter()
        for ref in references:
            ref_counts = _ngrams(ref, n)
            for gram in counts:
                max_counts[gram] = max(max_counts[gram], ref_counts[gram])
        clipped = sum(min(c, max_counts[g]) for g, c in counts.items())
        if n == 1:
            if clipped == 0:
                return 0.0
            p = clipped / total
        else:
            p = (clipped + 1) / (total + 1)
        log_sum += 0.25 * math.log(p)
    c = len(candidate)
    r = min((len(ref) for ref in references), key=lambda L: (abs(L - c), L))
    bp = 1.0 if c > r else math.exp(1 - r / c)
    return bp * math.exp(log_sum)


def code_similarity(sample: SampleRecord, params: dict) -> tuple[float, str]:
    cand = code_tokens(sample.prediction)
    refs = [code_tokens(r) for r in sample.references]
    score = smoothed_bleu4(cand, refs)
    return score, f"smoothed BLEU-4 over {len(cand)} candidate tokens"


_BRACKET_PAIRS = {")": "(", "]": "[", "}": "{"}
_BRANCH_WORD_RE = re.compile(r"\b(if|elif|elsif|for|while|case|catch)\b")


def _syntax_sane(text: str) -> bool:
    """Bracket-balance scan that skips string literals and line comments."""
    stack: list[str] = []
    in_string: Optional[str] = None
    i = 0
    while i < len(text):
        ch = text[i]
        if in_string:
            if ch == "\\":
                i += 2
                continue
            if ch == in_string:
                in_string = None
            elif ch == "\n" and in_string != '"""':
                in_string = None
            i += 1
            continue
        if ch in "\"'":
            in_string = ch
            i += 1
            continue
        if ch == "#" or (ch == "/" and i + 1 < len(text) and text[i + 1] == "/"):
            newline = text.find("\n", i)
            i = len(text) if newline == -1 else newline
            continue
        if ch in "([{":
            stack.append(ch)
        elif ch in ")]}":
            if not stack or stack[-1] != _BRACKET_PAIRS[ch]:
                return False
            stack.pop()
        i += 1
    return not stack and in_string is None


def cyclomatic_complexity(text: str) -> int:
    """Decision points plus one: branch keywords, &&, ||, ternary '?'."""
    decisions = len(_BRANCH_WORD_RE.findall(text))
    decisions += text.count("&&") + text.count("||")
    decisions += text.count("?")
    return 1 + decisions


def soft_code_execution(sample: SampleRecord, params: dict) -> tuple[float, str]:
    cc_budget = int(params.get("cc_budget", CC_BUDGET))
    snippet = sample.prediction
    if not snippet.strip() or not _syntax_sane(snippet):
        return 0.0, "failed syntactic sanity parse"
    cc = cyclomatic_complexity(snippet)
    penalty = min(max((cc - cc_budget) / cc_budget, 0.0), 0.5)
    return 1.0 - penalty, f"CC={cc} (budget {cc_budget}); no code executed"


# ---------------------------------------------------------------------------
# Behavioral metrics
# ---------------------------------------------------------------------------

_FENCE_RE = re.compile(r"```(?:json)?\s*(.*?)```", re.DOTALL)


def _largest_json_block(text: str) -> Optional[str]:
    fenced = [m.strip() for m in _FENCE_RE.findall(text)]
    blocks = list(fenced)
    for opener, closer in (("{", "}"), ("[", "]")):
        start = text.find(opener)
        end = text.rfind(closer)
        if start != -1 and end > start:
            blocks.append(text[start : end + 1])
    if not blocks:
        return None
    return max(blocks, key=len)


def _markdown_table_ok(text: str) -> bool:
    rows = [line.strip() for line in text.splitlines() if line.strip().startswith("|")]
    if len(rows) < 2:
        return False
    columns = rows[0].count("|")
    if any(row.count("|") != columns for row in rows):
        return False
    return any(set(row.replace("|", "").strip()) <= set("-: ") and "-" in row for row in rows[1:])


def format_compliance(sample: SampleRecord, params: dict) -> tuple[float, str]:
    expected = params.get("expected_format", "none")
    if expected == "none":
        return 1.0, "no format constraint"
    if expected == "json":
        block = _largest_json_block(sample.prediction)
        if block is None:
            return 0.0, "no JSON block found"
        try:
            json.loads(block)
            return 1.0, "JSON parsed"
        except json.JSONDecodeError as exc:
            return 0.0, f"JSON parse failed: {exc.msg}"
    if expected == "markdown_table":
        ok = _markdown_table_ok(sample.prediction)
        return (1.0, "markdown table parsed") if ok else (0.0, "no well-formed markdown table")
    if expected.startswith("regex:"):
        pattern = expected[len("regex:"):]
        ok = re.fullmatch(pattern, sample.prediction.strip(), re.DOTALL) is not None
        return (1.0, "regex full-match") if ok else (0.0, "regex did not match")
    return 0.0, f"unknown expected_format {expected!r}"


def extraction_rate(sample: SampleRecord, params: dict) -> tuple[float, str]:
    candidates = extract_final_answer(sample.prediction)
    if candidates:
        return 1.0, f"extracted {candidates[0]!r}"
    return 0.0, "no final answer found"


def reasoning_efficiency(sample: SampleRecord, params: dict) -> tuple[float, str]:
    budget = int(params.get("budget", REASONING_BUDGET))
    tokens = len(sample.prediction.split())
    if tokens == 0:
        return 1.0, "empty output"
    return budget / max(tokens, budget), f"{tokens} tokens against budget {budget}"


# ---------------------------------------------------------------------------
# Report-scope computations
# ---------------------------------------------------------------------------

def compute_gini(per_category_scores: dict[str, float]) -> tuple[float, str]:
    """Mean-absolute-difference Gini over category means; 0 when degenerate."""
    values = list(per_category_scores.values())
    n = len(values)
    if n < 2:
        return 0.0, "degenerate"
    mean = math.fsum(values) / n
    if mean == 0:
        return 0.0, "degenerate"
    abs_diff = math.fsum(abs(a - b) for a in values for b in values)
    return abs_diff / (2 * n * n * mean), f"over {n} categories"


def stable_seed(key: str) -> int:
    return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "big")


def analyze_failures(
    failed: list[SampleRecord],
    llm=None,
    sample_budget: int = 5,
    run_id: str = "run",
    params: dict | None = None,
    recorder=None,
) -> tuple[dict[str, int], list[dict]]:
    """Sample failures deterministically and classify each error.

    A judge model labels cases when available; otherwise classification is
    rule-based: format violation -> format_error, missing final answer ->
    extraction_error, else logic_error.
    """
    params = params or {}
    if not failed:
        return {}, []
    rng = random.Random(stable_seed(run_id))
    chosen = sorted(rng.sample(failed, min(sample_budget, len(failed))), key=lambda s: s.index)
    histogram: dict[str, int] = {}
    cases = []
    for sample in chosen:
        label = None
        if llm is not None:
            label = _judge_label(sample, llm, recorder)
        if label is None:
            label = _rule_label(sample, params)
        histogram[label] = histogram.get(label, 0) + 1
        cases.append({"index": sample.index, "error_class": label, "input": sample.input[:240], "prediction": sample.prediction[:240]})
    return histogram, cases


def _rule_label(sample: SampleRecord, params: dict) -> str:
    value, _ = format_compliance(sample, params)
    if value == 0.0:
        return "format_error"
    if not extract_final_answer(sample.prediction):
        return "extraction_error"
    return "logic_error"


_JUDGE_SCHEMA = {
    "type": "object",
    "properties": {"error_class": {"type": "string", "enum": list(ANALYST_CLASSES)}},
    "required": ["error_class"],
}


def _judge_label(sample: SampleRecord, llm, recorder) -> Optional[str]:
    from ..errors import StructuredOutputError, TransportError
    from ..llm import ChatMessage, ChatRequest, chat

    prompt = (
        "TASK: error_classification\n"
        "Classify the failure into one of: " + ", ".join(ANALYST_CLASSES) + ".\n"
        f"Input: {sample.input[:500]}\n"
        f"Prediction: {sample.prediction[:500]}\n"
        f"References: {sample.references}\n"
        'Reply as JSON: {"error_class": "..."}'
    )
    request = ChatRequest(messages=[ChatMessage("user", prompt)], response_schema=_JUDGE_SCHEMA)
    try:
        response = chat(llm, request, recorder=recorder)
    except (StructuredOutputError, TransportError):
        return None
    return response.parsed["error_class"] if response.parsed else None


# ---------------------------------------------------------------------------
# Registration
# ---------------------------------------------------------------------------

def build_registry() -> MetricRegistry:
    registry = MetricRegistry()

    metric(
        registry,
        "exact_match",
        "Strict text match against any reference after trimming, case folding, and whitespace collapsing.",
        applicable_tasks=("multiple_choice", "generation", "open_qa"),
        decision_rules="Use when references are short canonical strings (labels, entities, yes/no).",
        default_priority=1,
    )(exact_match)

    metric(
        registry,
        "math_verify",
        "Hybrid equivalence: extracts the final answer and accepts text or mathematical equivalence against references.",
        applicable_tasks=("math",),
        decision_rules="Default for math word problems and numeric answers in varying formats.",
        default_priority=1,
    )(math_verify)

    metric(
        registry,
        "symbolic_match",
        "Algebraic validation via canonical simplification; accepts only exact symbolic equivalence.",
        applicable_tasks=("math",),
        decision_rules="Use when answers are algebraic expressions and sampling-level agreement is not enough.",
        default_priority=2,
    )(symbolic_match)

    metric(
        registry,
        "soft_code_execution",
        "Execution-free static check: syntactic sanity plus a cyclomatic-complexity budget.",
        applicable_tasks=("code",),
        decision_rules="Use for code tasks when no sandboxed runtime is available.",
        default_priority=1,
    )(soft_code_execution)

    metric(
        registry,
        "code_similarity",
        "Smoothed BLEU-4 similarity between generated code and the reference solution.",
        applicable_tasks=("code",),
        decision_rules="Use as a reference proxy when executable test cases are unavailable.",
        default_priority=2,
    )(code_similarity)

    metric(
        registry,
        "format_compliance",
        "Rate of successful structural parsing (JSON, markdown table, or regex) of the model output.",
        applicable_tasks=("generation", "open_qa", "math", "code", "multiple_choice"),
        decision_rules="Use whenever the request pins an output format; returns 1 when no format is required.",
        default_priority=5,
    )(format_compliance)

    metric(
        registry,
        "extraction_rate",
        "Fraction of outputs from which a final answer can be isolated from the reasoning chain.",
        applicable_tasks=("math", "generation", "open_qa"),
        decision_rules="Use with chain-of-thought prompting to measure answer stability.",
        default_priority=4,
    )(extraction_rate)

    metric(
        registry,
        "reasoning_efficiency",
        "Penalizes token usage beyond a per-benchmark budget: score = budget / max(tokens, budget).",
        applicable_tasks=("math", "generation", "open_qa", "code"),
        decision_rules="Use to surface chatty failure modes; configure the budget per benchmark.",
        default_priority=6,
    )(reasoning_efficiency)

    metric(
        registry,
        "case_study_analyst",
        "Samples failed cases and classifies error types (e.g. hallucination vs. logic error) with a judge model.",
        applicable_tasks=(),
        decision_rules="Report-stage diagnostic; requires a judge model, falls back to rule-based labels.",
        needs_llm=True,
        default_priority=9,
        scope="report",
    )(analyze_failures)

    metric(
        registry,
        "gini_index",
        "Capability balance: mean-absolute-difference dispersion of per-category scores.",
        applicable_tasks=(),
        decision_rules="Report-stage diagnostic over category means; detects domain overfitting.",
        default_priority=9,
        scope="report",
    )(compute_gini)

    return registry
