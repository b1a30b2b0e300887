"""Canonicalization and evaluation of expression ASTs.

Normal form: constants folded in exact rational arithmetic, add/mul
flattened and operand-sorted, like terms collected, and pure polynomials
expanded to a sum of monomials up to total degree 6.  Above the bound the
partially-normalized form is flagged non-canonical and equivalence falls
through to numeric sampling.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .ast import ADD, FUNC, MUL, NEG, NUM, POW, SYM, Expr, num, sort_key

EXPANSION_DEGREE_BOUND = 6

_ZERO = num(0)
_ONE = num(1)


class EvalDomainError(ArithmeticError):
    """Expression is undefined at the given assignment."""


def degree_of(e: Expr) -> int | None:
    """Total polynomial degree, or None when the expression is not polynomial."""
    if e.kind == NUM:
        return 0
    if e.kind == SYM:
        return 1
    if e.kind == NEG:
        return degree_of(e.args[0])
    if e.kind == ADD:
        degrees = [degree_of(a) for a in e.args]
        return None if any(d is None for d in degrees) else max(degrees)
    if e.kind == MUL:
        degrees = [degree_of(a) for a in e.args]
        return None if any(d is None for d in degrees) else sum(degrees)
    if e.kind == POW:
        base, exp = e.args
        if exp.kind == NUM and exp.value.denominator == 1 and exp.value >= 0:
            base_deg = degree_of(base)
            return None if base_deg is None else base_deg * int(exp.value)
        return None
    return None  # FUNC


def _flatten(kind: str, args: tuple[Expr, ...]) -> list[Expr]:
    out: list[Expr] = []
    for a in args:
        if a.kind == kind:
            out.extend(a.args)
        else:
            out.append(a)
    return out


def _make_add(terms: list[Expr]) -> Expr:
    if not terms:
        return _ZERO
    if len(terms) == 1:
        return terms[0]
    return Expr(ADD, args=tuple(sorted(terms, key=sort_key)))


def _make_mul(factors: list[Expr]) -> Expr:
    if not factors:
        return _ONE
    if len(factors) == 1:
        return factors[0]
    return Expr(MUL, args=tuple(sorted(factors, key=sort_key)))


def _split_coefficient(term: Expr) -> tuple[Fraction, Expr]:
    """term -> (numeric coefficient, monomial part); monomial 1 for constants."""
    if term.kind == NUM:
        return term.value, _ONE
    if term.kind == MUL:
        coeff = Fraction(1)
        rest = []
        for f in term.args:
            if f.kind == NUM:
                coeff *= f.value
            else:
                rest.append(f)
        return coeff, _make_mul(rest)
    return Fraction(1), term


def _collect_terms(terms: list[Expr]) -> Expr:
    acc: dict[Expr, Fraction] = {}
    order: list[Expr] = []
    constant = Fraction(0)
    for t in terms:
        coeff, mono = _split_coefficient(t)
        if mono == _ONE:
            constant += coeff
            continue
        if mono not in acc:
            acc[mono] = Fraction(0)
            order.append(mono)
        acc[mono] += coeff
    out: list[Expr] = []
    for mono in order:
        coeff = acc[mono]
        if coeff == 0:
            continue
        out.append(mono if coeff == 1 else _make_mul([num(coeff)] + list(mono.args if mono.kind == MUL else [mono])))
    if constant != 0 or not out:
        out.append(num(constant))
    return _make_add(out)


def _collect_factors(factors: list[Expr]) -> Expr:
    """Fold constants and merge repeated bases: x*x -> x^2, x^a*x^b -> x^(a+b)."""
    coeff = Fraction(1)
    powers: dict[Expr, Fraction] = {}
    order: list[Expr] = []
    opaque: list[Expr] = []  # factors with non-numeric exponents
    for f in factors:
        if f.kind == NUM:
            coeff *= f.value
            continue
        if f.kind == POW and f.args[1].kind != NUM:
            opaque.append(f)
            continue
        if f.kind == POW:
            base, exp = f.args[0], f.args[1].value
        else:
            base, exp = f, Fraction(1)
        if base not in powers:
            powers[base] = Fraction(0)
            order.append(base)
        powers[base] += exp
    if coeff == 0:
        return _ZERO
    out: list[Expr] = []
    for base in order:
        exp = powers[base]
        if exp == 0:
            continue
        if exp == 1:
            out.append(base)
        else:
            out.append(_fold_pow(base, num(exp)))
    out.extend(opaque)
    if coeff != 1 or not out:
        out.insert(0, num(coeff))
    return _make_mul(out)


def _exact_root(value: Fraction, n: int) -> Fraction | None:
    """Exact n-th root of a non-negative rational, if one exists."""
    if value < 0:
        return None

    def iroot(k: int) -> int | None:
        if k in (0, 1):
            return k
        r = round(k ** (1.0 / n))
        for candidate in (r - 1, r, r + 1):
            if candidate >= 0 and candidate**n == k:
                return candidate
        return None

    num_root = iroot(value.numerator)
    den_root = iroot(value.denominator)
    if num_root is None or den_root is None:
        return None
    return Fraction(num_root, den_root)


def _fold_pow(base: Expr, exp: Expr) -> Expr:
    if exp.kind == NUM and exp.value == 0:
        return _ONE  # adopts the x^0 = 1 convention; x = 0 handled by sampling domain
    if exp.kind == NUM and exp.value == 1:
        return base
    if base.kind == NUM and exp.kind == NUM:
        b, e = base.value, exp.value
        if e.denominator == 1:
            n = int(e)
            if b != 0 or n > 0:
                return num(b**n)
        else:
            root = _exact_root(b, e.denominator)
            if root is not None:
                n = e.numerator
                if root != 0 or n > 0:
                    return num(root**n)
    if base.kind == POW and base.args[1].kind == NUM and exp.kind == NUM:
        return _fold_pow(base.args[0], num(base.args[1].value * exp.value))
    return Expr(POW, args=(base, exp))


def _expand_product(lhs: Expr, rhs: Expr) -> Expr:
    """Distribute a product of (possibly) sums; operands already normalized."""
    lhs_terms = lhs.args if lhs.kind == ADD else (lhs,)
    rhs_terms = rhs.args if rhs.kind == ADD else (rhs,)
    products = []
    for a in lhs_terms:
        for b in rhs_terms:
            products.append(_collect_factors(_flatten(MUL, (a, b))))
    return _collect_terms(products)


class _Normalizer:
    def __init__(self):
        self.canonical = True

    def normalize(self, e: Expr) -> Expr:
        if e.kind in (NUM, SYM):
            return e
        if e.kind == NEG:
            inner = self.normalize(e.args[0])
            if inner.kind == NUM:
                return num(-inner.value)
            return self.normalize_mul([num(-1), inner])
        if e.kind == ADD:
            terms = [self.normalize(a) for a in _flatten(ADD, e.args)]
            flat: list[Expr] = []
            for t in terms:
                flat.extend(t.args if t.kind == ADD else (t,))
            return _collect_terms(flat)
        if e.kind == MUL:
            return self.normalize_mul([self.normalize(a) for a in _flatten(MUL, e.args)])
        if e.kind == POW:
            return self.normalize_pow(self.normalize(e.args[0]), self.normalize(e.args[1]))
        if e.kind == FUNC:
            inner = self.normalize(e.args[0])
            if e.name == "abs" and inner.kind == NUM:
                return num(abs(inner.value))
            if e.name == "sqrt" and inner.kind == NUM:
                root = _exact_root(inner.value, 2)
                if root is not None:
                    return num(root)
            return Expr(FUNC, name=e.name, args=(inner,))
        raise AssertionError(e.kind)

    def normalize_mul(self, factors: list[Expr]) -> Expr:
        flat: list[Expr] = []
        for f in factors:
            flat.extend(f.args if f.kind == MUL else (f,))
        if any(f.kind == ADD for f in flat):
            total_degree = degree_of(Expr(MUL, args=tuple(flat)))
            if total_degree is not None and total_degree <= EXPANSION_DEGREE_BOUND:
                result = flat[0]
                for f in flat[1:]:
                    result = _expand_product(result, f)
                return result
            if total_degree is not None:
                self.canonical = False
        return _collect_factors(flat)

    def normalize_pow(self, base: Expr, exp: Expr) -> Expr:
        if exp.kind == NUM and exp.value.denominator == 1 and exp.value >= 2 and base.kind == ADD:
            n = int(exp.value)
            base_degree = degree_of(base)
            if base_degree is not None and base_degree * n <= EXPANSION_DEGREE_BOUND:
                result = base
                for _ in range(n - 1):
                    result = _expand_product(result, base)
                return result
            if base_degree is not None:
                self.canonical = False
        return _fold_pow(base, exp)


def normalize_info(e: Expr) -> tuple[Expr, bool]:
    """Normalize and report whether the result is fully canonical."""
    normalizer = _Normalizer()
    result = normalizer.normalize(e)
    # idempotence guard: a second pass settles orderings introduced by expansion
    second = _Normalizer()
    result = second.normalize(result)
    return result, normalizer.canonical and second.canonical


def normalize(e: Expr) -> Expr:
    return normalize_info(e)[0]


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def eval_expr(e: Expr, env: dict[str, float]) -> float:
    """Float evaluation; raises EvalDomainError where undefined."""
    try:
        value = _eval(e, env)
    except (ZeroDivisionError, ValueError, OverflowError) as exc:
        raise EvalDomainError(str(exc)) from exc
    if isinstance(value, complex):
        raise EvalDomainError("complex result")
    if not math.isfinite(value):
        raise EvalDomainError("non-finite result")
    return value


def _eval(e: Expr, env: dict[str, float]) -> float:
    if e.kind == NUM:
        return float(e.value)
    if e.kind == SYM:
        if e.name not in env:
            raise EvalDomainError(f"unbound symbol {e.name}")
        return env[e.name]
    if e.kind == NEG:
        return -_eval(e.args[0], env)
    if e.kind == ADD:
        return math.fsum(_eval(a, env) for a in e.args)
    if e.kind == MUL:
        out = 1.0
        for a in e.args:
            out *= _eval(a, env)
        return out
    if e.kind == POW:
        base = _eval(e.args[0], env)
        exp = _eval(e.args[1], env)
        if base == 0 and exp < 0:
            raise ZeroDivisionError("0 to a negative power")
        return base**exp
    if e.kind == FUNC:
        x = _eval(e.args[0], env)
        if e.name == "sqrt":
            return math.sqrt(x)
        if e.name == "abs":
            return abs(x)
        if e.name == "ln":
            return math.log(x)
        if e.name == "exp":
            return math.exp(x)
        if e.name == "sin":
            return math.sin(x)
        if e.name == "cos":
            return math.cos(x)
    raise AssertionError(e.kind)


def eval_rational(e: Expr, env: dict[str, Fraction]) -> Fraction:
    """Exact evaluation for polynomial ASTs (num/sym/add/mul/neg/int-pow)."""
    if e.kind == NUM:
        return e.value
    if e.kind == SYM:
        return env[e.name]
    if e.kind == NEG:
        return -eval_rational(e.args[0], env)
    if e.kind == ADD:
        return sum((eval_rational(a, env) for a in e.args), Fraction(0))
    if e.kind == MUL:
        out = Fraction(1)
        for a in e.args:
            out *= eval_rational(a, env)
        return out
    if e.kind == POW:
        exp = e.args[1]
        if exp.kind != NUM or exp.value.denominator != 1:
            raise ValueError("eval_rational supports integer exponents only")
        return eval_rational(e.args[0], env) ** int(exp.value)
    raise ValueError(f"eval_rational does not support {e.kind}")
