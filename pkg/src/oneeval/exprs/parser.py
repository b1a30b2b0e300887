"""Tokenizer and Pratt parser for benchmark-answer arithmetic.

Grammar: exact numbers (integer, decimal, percent), single-letter symbols,
+ - * / ^, implicit multiplication, unary minus, parentheses, and the
function set sqrt/abs/ln/exp/sin/cos.  Subtraction and division are lowered
onto the add/mul/pow core at parse time; purely numeric `a/b` and `-a` fold
to exact rationals immediately.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .ast import FUNCTIONS, Expr, add, func, mul, neg, num, pow_, sym


class ParseError(ValueError):
    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


_UNICODE_OPS = str.maketrans({"−": "-", "×": "*", "·": "*", "÷": "/", "²": "^2", "³": "^3"})
_CURRENCY = "$€£¥"
_BOXED_RE = re.compile(r"^\\boxed\s*\{(.*)\}$", re.DOTALL)
_THOUSANDS_RE = re.compile(r"(?<=\d),(?=\d)")


def preprocess_answer(text: str) -> str:
    """Strip whitespace, wrapper notation, currency marks, thousands separators."""
    s = text.strip()
    for _ in range(8):
        before = s
        m = _BOXED_RE.match(s)
        if m:
            s = m.group(1).strip()
        if len(s) > 1 and s.startswith("$") and s.endswith("$"):
            s = s[1:-1].strip()
        if s.startswith("\\(") and s.endswith("\\)"):
            s = s[2:-2].strip()
        if s == before:
            break
    s = _THOUSANDS_RE.sub("", s)
    s = "".join(ch for ch in s if ch not in _CURRENCY)
    return s.strip()


@dataclass(frozen=True)
class _Token:
    kind: str  # num, name, func, op
    text: str
    offset: int
    value: Fraction | None = None


def _tokenize(s: str) -> list[_Token]:
    s = s.translate(_UNICODE_OPS)
    tokens: list[_Token] = []
    i, n = 0, len(s)
    while i < n:
        c = s[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and s[i + 1].isdigit()):
            j = i
            while j < n and s[j].isdigit():
                j += 1
            if j < n and s[j] == ".":
                j += 1
                while j < n and s[j].isdigit():
                    j += 1
            raw = s[i:j]
            try:
                value = Fraction(raw)
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad number {raw!r}", i)
            if j < n and s[j] == "%":
                value /= 100
                j += 1
            tokens.append(_Token("num", raw, i, value))
            i = j
            continue
        if c.isalpha():
            j = i
            while j < n and s[j].isalpha():
                j += 1
            run = s[i:j]
            if run.lower() in FUNCTIONS:
                tokens.append(_Token("func", run.lower(), i))
            elif len(run) <= 3:
                # short alphabetic runs are implicit products of single-letter
                # symbols (benchmark convention: 2ab = 2*a*b); longer runs are
                # prose, not algebra
                for k, ch in enumerate(run):
                    tokens.append(_Token("name", ch, i + k))
            else:
                raise ParseError(f"word-like token {run!r}", i)
            i = j
            continue
        if c in "+-*/^()":
            tokens.append(_Token("op", c, i))
            i += 1
            continue
        raise ParseError(f"unknown token {c!r}", i)
    return tokens


# Binding powers: ^ > unary- > mul/div/implicit > add/sub.  ^ right-assoc.
_INFIX_BP = {"+": (10, 11), "-": (10, 11), "*": (20, 21), "/": (20, 21), "^": (30, 29)}
_UNARY_MINUS_BP = 25
_IMPLICIT_MUL_BP = (20, 21)


class _Parser:
    def __init__(self, tokens: list[_Token], length: int):
        self.tokens = tokens
        self.pos = 0
        self.length = length

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.length)
        self.pos += 1
        return tok

    def parse(self, min_bp: int) -> Expr:
        lhs = self.parse_prefix()
        while True:
            tok = self.peek()
            if tok is None:
                return lhs
            if tok.kind == "op" and tok.text in _INFIX_BP:
                lbp, rbp = _INFIX_BP[tok.text]
                if lbp < min_bp:
                    return lhs
                self.next()
                rhs = self.parse(rbp)
                lhs = self.combine(tok.text, lhs, rhs)
                continue
            if tok.kind in ("num", "name", "func") or (tok.kind == "op" and tok.text == "("):
                lbp, rbp = _IMPLICIT_MUL_BP
                if lbp < min_bp:
                    return lhs
                rhs = self.parse(rbp)
                lhs = mul(lhs, rhs)
                continue
            return lhs

    def parse_prefix(self) -> Expr:
        tok = self.next()
        if tok.kind == "num":
            return Expr("num", value=tok.value)
        if tok.kind == "name":
            return sym(tok.text)
        if tok.kind == "func":
            opening = self.next()
            if not (opening.kind == "op" and opening.text == "("):
                raise ParseError(f"{tok.text} requires parentheses", opening.offset)
            inner = self.parse(0)
            self.expect(")")
            return func(tok.text, inner)
        if tok.kind == "op" and tok.text == "(":
            inner = self.parse(0)
            self.expect(")")
            return inner
        if tok.kind == "op" and tok.text == "-":
            operand = self.parse(_UNARY_MINUS_BP)
            if operand.is_num():
                return num(-operand.value)
            return neg(operand)
        if tok.kind == "op" and tok.text == "+":
            return self.parse(_UNARY_MINUS_BP)
        raise ParseError(f"unexpected token {tok.text!r}", tok.offset)

    def expect(self, text: str) -> None:
        tok = self.peek()
        if tok is None or tok.kind != "op" or tok.text != text:
            offset = tok.offset if tok else self.length
            raise ParseError(f"expected {text!r}", offset)
        self.next()

    @staticmethod
    def combine(op: str, lhs: Expr, rhs: Expr) -> Expr:
        if op == "+":
            return add(lhs, rhs)
        if op == "-":
            rhs_neg = num(-rhs.value) if rhs.is_num() else neg(rhs)
            return add(lhs, rhs_neg)
        if op == "*":
            return mul(lhs, rhs)
        if op == "/":
            if lhs.is_num() and rhs.is_num() and rhs.value != 0:
                return num(lhs.value / rhs.value)
            return mul(lhs, pow_(rhs, num(-1)))
        if op == "^":
            return pow_(lhs, rhs)
        raise AssertionError(op)


def parse_expr(text: str) -> Expr:
    """Parse answer text into an AST; raises ParseError with a byte offset."""
    stripped = preprocess_answer(text)
    if not stripped:
        raise ParseError("empty expression", 0)
    tokens = _tokenize(stripped)
    if not tokens:
        raise ParseError("empty expression", 0)
    parser = _Parser(tokens, len(stripped))
    result = parser.parse(0)
    leftover = parser.peek()
    if leftover is not None:
        raise ParseError(f"unconsumed input {leftover.text!r}", leftover.offset)
    return result


def to_text(e: Expr) -> str:
    """Render an AST so that parse(to_text(e)) == e (for parser-produced trees)."""
    if e.kind == "num":
        v = e.value
        magnitude = str(v.numerator) if v.denominator == 1 else f"{abs(v.numerator)}/{v.denominator}"
        if v < 0:
            return f"(-{abs(v.numerator)}/{v.denominator})" if v.denominator != 1 else f"(-{abs(v.numerator)})"
        return f"({magnitude})" if v.denominator != 1 else magnitude
    if e.kind == "sym":
        return e.name
    if e.kind == "neg":
        return f"(-({to_text(e.args[0])}))"
    if e.kind == "add":
        return "(" + " + ".join(to_text(a) for a in e.args) + ")"
    if e.kind == "mul":
        return "(" + " * ".join(to_text(a) for a in e.args) + ")"
    if e.kind == "pow":
        return f"(({to_text(e.args[0])})^({to_text(e.args[1])}))"
    if e.kind == "func":
        return f"{e.name}({to_text(e.args[0])})"
    raise AssertionError(e.kind)
