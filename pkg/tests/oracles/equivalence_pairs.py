"""Pinned equivalence corpus with hand-written lambda oracles.

Each entry: (text_a, text_b, fn_a, fn_b, arg_names, expected_equivalent).
The lambdas restate each side independently of the expression engine, so
numeric sampling over them is an engine-free ground truth.
"""

import math

EQUIVALENT_PAIRS = [
    ("0.5", "1/2", lambda: 0.5, lambda: 1 / 2, ()),
    ("x+x", "2*x", lambda x: x + x, lambda x: 2 * x, ("x",)),
    ("(a+b)^2", "a^2+2ab+b^2", lambda a, b: (a + b) ** 2, lambda a, b: a**2 + 2 * a * b + b**2, ("a", "b")),
    ("x + x", "2x", lambda x: x + x, lambda x: 2 * x, ("x",)),
    ("b*a", "a*b", lambda a, b: b * a, lambda a, b: a * b, ("a", "b")),
    ("3.50", "7/2", lambda: 3.5, lambda: 7 / 2, ()),
    ("50%", "0.5", lambda: 0.5, lambda: 0.5, ()),
    ("\\boxed{42}", "42", lambda: 42, lambda: 42, ()),
    ("(x+1)(x-1)", "x^2-1", lambda x: (x + 1) * (x - 1), lambda x: x**2 - 1, ("x",)),
    ("2(x+3)", "2x+6", lambda x: 2 * (x + 3), lambda x: 2 * x + 6, ("x",)),
    ("x^2*x", "x^3", lambda x: x**2 * x, lambda x: x**3, ("x",)),
    ("sqrt(4)", "2", lambda: math.sqrt(4), lambda: 2, ()),
    ("1/4 + 1/4", "0.5", lambda: 0.25 + 0.25, lambda: 0.5, ()),
    ("-(a-b)", "b-a", lambda a, b: -(a - b), lambda a, b: b - a, ("a", "b")),
    ("sqrt(x)*sqrt(x)", "x", lambda x: math.sqrt(x) * math.sqrt(x), lambda x: x, ("x",)),
]

DIFFERENT_PAIRS = [
    ("x+1", "x+2", lambda x: x + 1, lambda x: x + 2, ("x",)),
    ("0.49", "0.5", lambda: 0.49, lambda: 0.5, ()),
    ("x^2", "x^3", lambda x: x**2, lambda x: x**3, ("x",)),
    ("sin(x)", "cos(x)", lambda x: math.sin(x), lambda x: math.cos(x), ("x",)),
    ("a+b", "a*b", lambda a, b: a + b, lambda a, b: a * b, ("a", "b")),
    ("2x", "x/2", lambda x: 2 * x, lambda x: x / 2, ("x",)),
    ("1/3", "0.3", lambda: 1 / 3, lambda: 0.3, ()),
    ("(a+b)^2", "a^2+b^2", lambda a, b: (a + b) ** 2, lambda a, b: a**2 + b**2, ("a", "b")),
    ("x-1", "1-x", lambda x: x - 1, lambda x: 1 - x, ("x",)),
    ("sqrt(2)", "1.414", lambda: math.sqrt(2), lambda: 1.414, ()),
    ("exp(x)", "x+1", lambda x: math.exp(x), lambda x: x + 1, ("x",)),
    ("ln(x)", "x-1", lambda x: math.log(x), lambda x: x - 1, ("x",)),
    ("7", "-7", lambda: 7, lambda: -7, ()),
    ("x*y+1", "x*y-1", lambda x, y: x * y + 1, lambda x, y: x * y - 1, ("x", "y")),
    ("abs(x)", "x^2", lambda x: abs(x), lambda x: x**2, ("x",)),
]


def oracle_verdict(fn_a, fn_b, arg_names, samples=64, seed=913, tol=1e-6) -> bool:
    """Numeric-sampling ground truth over the hand-written lambdas."""
    import random

    rng = random.Random(seed)
    usable = 0
    for _ in range(samples):
        args = []
        for _name in arg_names:
            u = rng.uniform(0.0, 5.8)
            args.append(-3.0 + u if u < 2.9 else 0.1 + (u - 2.9))
        try:
            va, vb = fn_a(*args), fn_b(*args)
        except (ValueError, ZeroDivisionError, OverflowError):
            continue
        usable += 1
        if abs(va - vb) > tol * max(1.0, abs(va), abs(vb)):
            return False
    return usable > 0
