"""Slow, obviously-correct reference implementations used by the tests."""

from fractions import Fraction
from itertools import product


def brute_sumset(a, b, s, t):
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in b]
    out = set()
    for plus in product(a, repeat=s):
        for minus in product(b, repeat=t):
            out.add(sum(plus, Fraction(0)) - sum(minus, Fraction(0)))
    return sorted(out)


def brute_convexity_order(a, k_max):
    seq = sorted(Fraction(x) for x in a)
    order = 0
    for level in range(1, min(k_max, len(seq) - 2) + 1):
        seq = [y - x for x, y in zip(seq, seq[1:])]
        if any(y <= x for x, y in zip(seq, seq[1:])):
            break
        order = level
    return order


def brute_n_k(b, k):
    b = sorted(Fraction(x) for x in b)
    s = brute_sumset(b, b, 2 ** k, 2 ** k - 1)
    return sum(1 for v in s if b[0] < v < b[-1])
