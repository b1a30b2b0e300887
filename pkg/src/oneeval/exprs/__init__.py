"""Arithmetic/algebraic expression engine behind the math metrics.

Parsing, exact-rational canonicalization, three-stage equivalence checking,
and final-answer extraction from model prose.
"""

from .ast import Expr, add, func, mul, num, neg, pow_, sym
from .parser import ParseError, parse_expr, preprocess_answer, to_text
from .simplify import degree_of, eval_expr, eval_rational, normalize, normalize_info
from .answers import EquivalenceResult, equivalence_details, equivalent, extract_final_answer

__all__ = [
    "Expr", "add", "func", "mul", "num", "neg", "pow_", "sym",
    "ParseError", "parse_expr", "preprocess_answer", "to_text",
    "degree_of", "eval_expr", "eval_rational", "normalize", "normalize_info",
    "EquivalenceResult", "equivalence_details", "equivalent", "extract_final_answer",
]
