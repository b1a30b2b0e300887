"""Hand-computed smoothed BLEU-4 for the pinned code-similarity pairs.

Exact Fraction arithmetic over manually enumerated n-gram overlaps; the
only shared convention with the engine is the token split itself.
"""

from fractions import Fraction
import math
import re


def tokens(text):
    return re.findall(r"\w+|[^\w\s]", text)


def manual_bleu(candidate_text, reference_text):
    cand = tokens(candidate_text)
    ref = tokens(reference_text)

    def grams(seq, n):
        return [tuple(seq[i : i + n]) for i in range(len(seq) - n + 1)]

    precisions = []
    for n in range(1, 5):
        cg, rg = grams(cand, n), grams(ref, n)
        clipped = 0
        remaining = list(rg)
        for g in cg:
            if g in remaining:
                remaining.remove(g)
                clipped += 1
        total = len(cg)
        if n == 1:
            if clipped == 0:
                return 0.0
            precisions.append(Fraction(clipped, total))
        else:
            precisions.append(Fraction(clipped + 1, total + 1))
    product = Fraction(1)
    for p in precisions:
        product *= p
    c, r = len(cand), len(ref)
    bp = 1.0 if c > r else math.exp(1 - r / c)
    return bp * float(product) ** 0.25


# (candidate, reference, oracle value) for the three pinned pairs
PINNED_PAIRS = [
    ("a = 1\nb = 2", "a = 1\nb = 3"),
    ("def f(x):\n    return x + 1", "def f(x):\n    return x + 1"),
    ("for i in range(10): print(i)", "while True: pass"),
]
