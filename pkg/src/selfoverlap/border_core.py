"""Borders, periods and maximum self-overlap of a single word.

Words are sequences of 0-based letter indices.  ``first_return`` and
``max_overlap`` use the prefix (failure) function, so they run in O(n);
the ``naive_*`` functions scan the definitions directly and exist as
independent oracles.
"""

from __future__ import annotations

from typing import Sequence

Word = Sequence[int]

LETTERS = "abcdefghijklmnopqrstuvwxyz"


def parse_word(text: str) -> tuple[int, ...]:
    """``"abab"`` -> (0, 1, 0, 1); ``"0110"`` -> (0, 1, 1, 0); ``"0,3,12"`` -> (0, 3, 12)."""
    text = text.strip()
    if "," in text:
        return tuple(int(t) for t in text.split(",") if t.strip())
    if text.isdigit():
        return tuple(int(ch) for ch in text)
    out = []
    for ch in text:
        idx = LETTERS.find(ch)
        if idx < 0:
            raise ValueError(f"letter {ch!r} is not in a-z; use a comma-separated integer list")
        out.append(idx)
    return tuple(out)


def format_word(w: Word) -> str:
    if all(x < len(LETTERS) for x in w):
        return "".join(LETTERS[x] for x in w)
    return ",".join(str(x) for x in w)


def prefix_function(w: Word) -> list[int]:
    """pi[t] = length of the longest proper border of w[:t+1]."""
    n = len(w)
    pi = [0] * n
    for t in range(1, n):
        k = pi[t - 1]
        while k and w[t] != w[k]:
            k = pi[k - 1]
        if w[t] == w[k]:
            k += 1
        pi[t] = k
    return pi


def max_overlap(w: Word) -> int:
    """S_n: length of the longest proper border (0 if unbordered)."""
    if not w:
        raise ValueError("empty word")
    return prefix_function(w)[-1]


def first_return(w: Word) -> int:
    """T_n = n - S_n; equals n when the word is unbordered."""
    return len(w) - max_overlap(w)


def borders(w: Word) -> list[int]:
    """All proper border lengths, ascending, by walking the failure chain."""
    if not w:
        raise ValueError("empty word")
    pi = prefix_function(w)
    out = []
    k = pi[-1]
    while k:
        out.append(k)
        k = pi[k - 1]
    return out[::-1]


def border_mask(w: Word) -> int:
    """Bit k set iff k is a border length."""
    m = 0
    for k in borders(w):
        m |= 1 << k
    return m


def _check_range(n: int, k: int, name: str) -> None:
    if not (1 <= k <= n - 1):
        raise ValueError(f"{name}={k} outside [1, {n - 1}] for a word of length {n}")


def in_R(w: Word, k: int) -> bool:
    """True iff the length-k prefix equals the length-k suffix."""
    n = len(w)
    _check_range(n, k, "k")
    return tuple(w[:k]) == tuple(w[n - k:])


def in_B(w: Word, j: int) -> bool:
    """True iff w is the j-periodic extension of its first j letters."""
    n = len(w)
    _check_range(n, j, "j")
    return all(w[t] == w[t % j] for t in range(n))


def naive_first_return(w: Word) -> int:
    n = len(w)
    for k in range(1, n):
        if tuple(w[: n - k]) == tuple(w[k:]):
            return k
    return n


def naive_max_overlap(w: Word) -> int:
    return len(w) - naive_first_return(w)


def naive_borders(w: Word) -> list[int]:
    n = len(w)
    return [k for k in range(1, n) if tuple(w[:k]) == tuple(w[n - k:])]
