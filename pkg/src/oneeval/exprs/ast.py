"""Expression AST with exact rational constants."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

FUNCTIONS = ("sqrt", "abs", "ln", "exp", "sin", "cos")

# kind values
NUM = "num"
SYM = "sym"
ADD = "add"
MUL = "mul"
POW = "pow"
NEG = "neg"
FUNC = "func"


@dataclass(frozen=True)
class Expr:
    kind: str
    value: Optional[Fraction] = None  # NUM only
    name: Optional[str] = None        # SYM and FUNC
    args: tuple["Expr", ...] = field(default=())

    def is_num(self) -> bool:
        return self.kind == NUM

    def is_integer(self) -> bool:
        return self.kind == NUM and self.value.denominator == 1

    def free_symbols(self) -> set[str]:
        if self.kind == SYM:
            return {self.name}
        out: set[str] = set()
        for a in self.args:
            out |= a.free_symbols()
        return out


def num(value) -> Expr:
    return Expr(NUM, value=Fraction(value))


def sym(name: str) -> Expr:
    return Expr(SYM, name=name)


def add(*args: Expr) -> Expr:
    if len(args) < 2:
        raise ValueError("add needs at least 2 operands")
    return Expr(ADD, args=tuple(args))


def mul(*args: Expr) -> Expr:
    if len(args) < 2:
        raise ValueError("mul needs at least 2 operands")
    return Expr(MUL, args=tuple(args))


def pow_(base: Expr, exponent: Expr) -> Expr:
    return Expr(POW, args=(base, exponent))


def neg(operand: Expr) -> Expr:
    return Expr(NEG, args=(operand,))


def func(name: str, operand: Expr) -> Expr:
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    return Expr(FUNC, name=name, args=(operand,))


_KIND_RANK = {ADD: 0, MUL: 1, POW: 2, NEG: 3, FUNC: 4}


def sort_key(e: Expr):
    """Total order: numbers < symbols < compounds, then recursive."""
    if e.kind == NUM:
        return (0, e.value)
    if e.kind == SYM:
        return (1, e.name)
    return (2, _KIND_RANK[e.kind], e.name or "", tuple(sort_key(a) for a in e.args))
