"""Brute-force reference values.

Nothing here imports the package: words are tuples, borders are found by
comparing slices, probabilities are Fraction products.  Slow on purpose.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def borders(w) -> list[int]:
    n = len(w)
    return [k for k in range(1, n) if tuple(w[:k]) == tuple(w[n - k :])]


def overlap(w) -> int:
    b = borders(w)
    return b[-1] if b else 0


def weight(w, probs) -> Fraction:
    out = Fraction(1)
    for a in w:
        out *= probs[a]
    return out


def words(n: int, s: int):
    return itertools.product(range(s), repeat=n)


def pmf(n: int, probs) -> list[Fraction]:
    out = [Fraction(0)] * n
    for w in words(n, len(probs)):
        out[overlap(w)] += weight(w, probs)
    return out


def unbordered(n: int, s: int) -> int:
    return sum(1 for w in words(n, s) if not borders(w))


def step_coupling(n: int, probs) -> Fraction:
    """P(S_{n+1} = S_n + 1) where S_n is read off the first n letters."""
    total = Fraction(0)
    for w in words(n + 1, len(probs)):
        if overlap(w) == overlap(w[:n]) + 1:
            total += weight(w, probs)
    return total


def level_mass(i: int, k: int, probs, q: int = 2) -> Fraction:
    return sum((weight(w, probs) ** q for w in words(i, len(probs)) if overlap(w) == k), Fraction(0))
