"""Exhaustive enumeration of all words of a given length.

Every word of ``C^n`` is visited once and reduced to two integers: its
border mask (bit ``k`` set iff the word has a border of length ``k``) and
its letter composition.  Words with the same (mask, composition) have the
same border structure and the same probability under every product
measure, so a :class:`Census` of these pairs is enough to evaluate the law
of ``S_n``, the level masses ``D_q(i, k)`` and the probability of any
Boolean combination of the events ``R_n(j)`` exactly.

Words are enumerated as base-``s`` integers in vectorized chunks; the
counts are integers, so the result does not depend on chunking or on the
number of worker threads.
"""

from __future__ import annotations

import functools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .alphabet import Theta

DEFAULT_BUDGET = int(float(os.environ.get("SELFOVERLAP_BUDGET", "1e8")))
CHUNK = 1 << 20
MAX_N = 62


class BudgetExceeded(RuntimeError):
    """Enumeration would visit more words than the budget allows."""

    def __init__(self, n: int, s: int, budget: int):
        self.n, self.s, self.budget = n, s, budget
        self.required = s**n
        super().__init__(
            f"enumerating {s}^{n} = {self.required} words exceeds the budget of {budget}"
            " (raise it with SELFOVERLAP_BUDGET or --budget)"
        )


def check_budget(n: int, s: int, budget: int | None = None) -> None:
    budget = DEFAULT_BUDGET if budget is None else budget
    if n > MAX_N or s**n > budget:
        raise BudgetExceeded(n, s, budget)


def _shifts(n: int, s: int, w: np.ndarray):
    """Yield (k, prefix_k, suffix_k) for k = 1..n-1 over base-s encoded words."""
    if s & (s - 1) == 0:
        bits = s.bit_length() - 1
        for k in range(1, n):
            yield k, w >> (bits * (n - k)), w & ((1 << (bits * k)) - 1)
    else:
        for k in range(1, n):
            yield k, w // s ** (n - k), w % s**k


def _compositions(n: int, s: int, w: np.ndarray) -> np.ndarray:
    """Code sum_a c_a (n+1)^a over letters a < s-1 (the last count is implied)."""
    if s == 2:
        return n - np.bitwise_count(w).astype(np.int64)
    comp = np.zeros(w.shape, dtype=np.int64)
    rest = w.copy()
    for _ in range(n):
        digit = rest % s
        rest //= s
        for a in range(s - 1):
            comp += (digit == a) * (n + 1) ** a
    return comp


def _comp_width(n: int, s: int) -> int:
    return (n + 1) ** (s - 1)


def _chunk_census(n: int, s: int, start: int, stop: int, compositions: bool):
    w = np.arange(start, stop, dtype=np.int64)
    mask = np.zeros(w.shape, dtype=np.int64)
    for k, pre, suf in _shifts(n, s, w):
        mask |= (pre == suf).astype(np.int64) << k
    if not compositions:
        uniq, counts = np.unique(mask, return_counts=True)
        return [(int(u), 0, int(c)) for u, c in zip(uniq, counts)]
    comp = _compositions(n, s, w)
    width = _comp_width(n, s)
    if width * (1 << n) < (1 << 62):
        uniq, counts = np.unique(mask * width + comp, return_counts=True)
        return [(int(u // width), int(u % width), int(c)) for u, c in zip(uniq, counts)]
    pairs, counts = np.unique(np.stack([mask, comp], axis=1), axis=0, return_counts=True)
    return [(int(m), int(c), int(k)) for (m, c), k in zip(pairs, counts)]


def overlap_of(n: int, s: int, w: np.ndarray) -> np.ndarray:
    """S_n for each base-s encoded word in ``w``."""
    S = np.zeros(w.shape, dtype=np.int64)
    for k, pre, suf in _shifts(n, s, w):
        S[pre == suf] = k
    return S


def _chunk_overlap(n: int, s: int, start: int, stop: int, compositions: bool):
    """Counts per (S_n, composition code) for one chunk of words."""
    w = np.arange(start, stop, dtype=np.int64)
    S = overlap_of(n, s, w)
    width = _comp_width(n, s) if compositions else 1
    if width * n <= 1 << 22:
        key = S * width + _compositions(n, s, w) if compositions else S
        hist = np.bincount(key, minlength=width * n)
        nz = np.nonzero(hist)[0]
        return [(int(u // width), int(u % width), int(hist[u])) for u in nz]
    pairs, counts = np.unique(np.stack([S, _compositions(n, s, w)], axis=1), axis=0, return_counts=True)
    return [(int(m), int(c), int(k)) for (m, c), k in zip(pairs, counts)]


def _decode_comp(code: int, n: int, s: int) -> tuple[int, ...]:
    base = n + 1
    out = []
    for _ in range(s - 1):
        out.append(code % base)
        code //= base
    out.append(n - sum(out))
    return tuple(out)


@dataclass(frozen=True)
class Census:
    """Counts of words of length ``n`` over ``s`` letters per (key, composition).

    ``kind="mask"``: the key is the full border mask.  ``kind="overlap"``:
    the key is S_n alone, which is all the distribution needs and is
    cheaper to build.
    """

    n: int
    s: int
    kind: str
    keys: tuple
    comps: tuple  # letter-count tuples, or None when compositions were not tracked
    counts: tuple
    _weights: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def _weight(self, theta: Theta, comp, q: int):
        key = (theta.probs, comp, q)
        w = self._weights.get(key)
        if w is None:
            if comp is None:
                w = theta.probs[0] ** (q * self.n)
            else:
                w = theta.one()
                for p, c in zip(theta.probs, comp):
                    if c:
                        w *= p ** (q * c)
            self._weights[key] = w
        return w

    def mass(self, theta: Theta, select=None, q: int = 1):
        """Sum of P(w)**q over words whose key passes ``select``."""
        if len(theta.probs) != self.s:
            raise ValueError(f"theta has {len(theta.probs)} letters, census has {self.s}")
        if self.comps is None and not theta.is_uniform:
            raise ValueError("census without compositions only supports uniform theta")
        # group by composition first, so each weight multiplies an integer count
        grouped: dict = {}
        for m, c, cnt in self.rows():
            if select is None or select(m):
                grouped[c] = grouped.get(c, 0) + cnt
        total = theta.zero()
        for c in sorted(grouped, key=lambda x: (x is None, x)):
            total += grouped[c] * self._weight(theta, c, q)
        return total

    def rows(self):
        return zip(self.keys, self.comps or [None] * len(self.keys), self.counts)

    def count(self, select=None) -> int:
        return sum(cnt for m, cnt in zip(self.keys, self.counts) if select is None or select(m))

    def by_overlap(self, theta: Theta, q: int = 1) -> list:
        """[sum of P(w)**q over words with S_n = k for k in 0..n-1]."""
        grouped: dict = {}
        for m, c, cnt in self.rows():
            k = top_bit(m) if self.kind == "mask" else m
            grouped[(k, c)] = grouped.get((k, c), 0) + cnt
        out = [theta.zero() for _ in range(self.n)]
        for (k, c), cnt in sorted(grouped.items(), key=lambda kv: (kv[0][0], kv[0][1] is None, kv[0][1])):
            out[k] += cnt * self._weight(theta, c, q)
        return out


@functools.lru_cache(maxsize=128)
def _census(n: int, s: int, compositions: bool, threads: int, kind: str) -> Census:
    total = s**n
    worker = _chunk_census if kind == "mask" else _chunk_overlap
    bounds = [(a, min(a + CHUNK, total)) for a in range(0, total, CHUNK)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda b: worker(n, s, b[0], b[1], compositions), bounds))
    else:
        parts = [worker(n, s, a, b, compositions) for a, b in bounds]
    acc: dict = {}
    for part in parts:
        for m, c, cnt in part:
            acc[(m, c)] = acc.get((m, c), 0) + cnt
    keys = sorted(acc)
    return Census(
        n=n,
        s=s,
        kind=kind,
        keys=tuple(m for m, _ in keys),
        comps=tuple(_decode_comp(c, n, s) for _, c in keys) if compositions else None,
        counts=tuple(acc[k] for k in keys),
    )


def census(n: int, s: int, compositions: bool = True, budget: int | None = None, threads: int = 1, kind: str = "mask") -> Census:
    if n < 1:
        raise ValueError("word length must be >= 1")
    if kind not in ("mask", "overlap"):
        raise ValueError(f"unknown census kind {kind!r}")
    check_budget(n, s, budget)
    return _census(n, s, compositions, max(1, threads), kind)


def census_for(n: int, theta: Theta, budget: int | None = None, threads: int = 1, kind: str = "mask") -> Census:
    return census(n, theta.size, compositions=not theta.is_uniform, budget=budget, threads=threads, kind=kind)


def top_bit(mask: int) -> int:
    return mask.bit_length() - 1 if mask else 0


def bits(ks: Iterable[int]) -> int:
    m = 0
    for k in ks:
        m |= 1 << k
    return m


def event(any_of: Iterable[int] = (), all_of: Iterable[int] = (), none_of: Iterable[int] = ()):
    """Predicate on border masks: some border in ``any_of`` (if given), every
    border in ``all_of``, and no border in ``none_of``."""
    a, b, c = bits(any_of), bits(all_of), bits(none_of)

    def select(m: int) -> bool:
        return (not a or m & a) and (m & b) == b and not (m & c)

    return select


# ---------------------------------------------------------------------------
# distributions


@dataclass
class DistTable:
    n: int
    pmf: list
    mode: str
    producer: str = "enumeration"
    stderr: list | None = None

    def tail(self, k: int):
        """G_n(k) = P(S_n >= k)."""
        zero = self.pmf[0] * 0
        return sum(self.pmf[k:], zero)

    def total(self):
        return sum(self.pmf[1:], self.pmf[0])

    def check(self) -> None:
        if any(p < 0 for p in self.pmf):
            raise AssertionError("negative probability in pmf")
        tot = self.total()
        if self.mode == "exact" and self.producer != "montecarlo":
            if tot != 1:
                raise AssertionError(f"pmf sums to {tot}")
        elif abs(float(tot) - 1) > 1e-12:
            raise AssertionError(f"pmf sums to {tot!r}")

    def to_json(self) -> dict:
        def enc(v):
            return str(v) if isinstance(v, Fraction) else float(v)

        out = {"n": self.n, "mode": self.mode, "producer": self.producer, "pmf": [enc(p) for p in self.pmf]}
        if self.mode == "exact":
            out["pmf_float"] = [float(p) for p in self.pmf]
        if self.stderr is not None:
            out["stderr"] = [float(e) for e in self.stderr]
        return out

    def csv_rows(self):
        yield ("k", "probability")
        for k, p in enumerate(self.pmf):
            yield (k, str(p) if isinstance(p, Fraction) else repr(float(p)))


def enumerate_distribution(n: int, theta: Theta, budget: int | None = None, threads: int = 1) -> DistTable:
    """Exact law of S_n by visiting every word of length n."""
    theta = theta.finite()
    cen = census_for(n, theta, budget, threads, kind="overlap")
    return DistTable(n=n, pmf=cen.by_overlap(theta), mode=theta.mode)


def count_by_overlap(n: int, s: int, budget: int | None = None, threads: int = 1) -> list[int]:
    """Number of words of length n over s letters with S_n = k, for each k."""
    cen = census(n, s, compositions=False, budget=budget, threads=threads, kind="overlap")
    out = [0] * n
    for k, cnt in zip(cen.keys, cen.counts):
        out[k] += cnt
    return out


@dataclass
class LevelMass:
    """D_q(i, k) = sum of P(w)**q over words w of length i with S_i(w) = k."""

    q: int
    table: dict  # i -> list indexed by k (length i)

    def __call__(self, i: int, k: int):
        row = self.table[i]
        return row[k] if k < len(row) else row[0] * 0

    def row_sum(self, i: int):
        row = self.table[i]
        return sum(row[1:], row[0])


def level_row(i: int, q: int, theta: Theta, budget: int | None = None, threads: int = 1) -> list:
    """[D_q(i, k) for k in 0..i-1]."""
    theta = theta.finite()
    return census_for(i, theta, budget, threads, kind="overlap").by_overlap(theta, q)


def level_mass(i_max: int, k_max: int, q: int, theta: Theta, budget: int | None = None, threads: int = 1) -> LevelMass:
    """Exact D_q(i, k) for 1 <= i <= i_max and k <= k_max."""
    table = {}
    for i in range(1, i_max + 1):
        row = level_row(i, q, theta, budget, threads)
        table[i] = row[: k_max + 1]
    return LevelMass(q=q, table=table)


# ---------------------------------------------------------------------------
# set algebra on the events R_n(j)


def prob(n: int, theta: Theta, any_of=(), all_of=(), none_of=(), budget: int | None = None):
    """Probability that a length-n word has some border in ``any_of``, every
    border length in ``all_of`` and none in ``none_of``.

    An empty ``any_of`` imposes no condition here; :func:`union_prob` treats
    an empty union as the empty event instead.
    """
    theta = theta.finite()
    cen = census_for(n, theta, budget)
    return cen.mass(theta, event(any_of, all_of, none_of))


def union_prob(n: int, J: Iterable[int], theta: Theta, *, intersect: Iterable[int] = (), minus: Iterable[int] = (), budget: int | None = None):
    """P((U_{j in J} R_n(j)) cap R_n(i) for i in intersect, minus U_{j in minus} R_n(j)).

    A union over an empty index set is the empty event, so an empty ``J``
    gives 0.
    """
    J = [j for j in J]
    for j in [*J, *intersect, *minus]:
        if not (1 <= j <= n - 1):
            raise ValueError(f"border length {j} outside [1, {n - 1}]")
    if not J:
        return theta.zero()
    return prob(n, theta, any_of=J, all_of=intersect, none_of=minus, budget=budget)


def theorem31_pmf(n: int, k: int, theta: Theta, budget: int | None = None):
    """P(S_n = k) as m_2^k - b_{k,n}, with b_{k,n} evaluated by set algebra."""
    from .limit_series import finite_n_terms

    if k < 1:
        raise ValueError("k must be >= 1; use zero_words for P(S_n = 0)")
    if n < 2 * k:
        raise ValueError(f"need n >= 2k, got n={n}, k={k}")
    _, b = finite_n_terms(k, n, theta, budget=budget)
    return theta.finite().moment(2) ** k - b


def theorem31_tail(n: int, k: int, theta: Theta, budget: int | None = None):
    """P(S_n >= k) as m_2^k + a_{k,n}."""
    from .limit_series import finite_n_terms

    if k < 1:
        raise ValueError("k must be >= 1")
    if n < 2 * k:
        raise ValueError(f"need n >= 2k, got n={n}, k={k}")
    a, _ = finite_n_terms(k, n, theta, budget=budget)
    return theta.finite().moment(2) ** k + a


def word_mass(n: int, theta: Theta, predicate, budget: int | None = None):
    """P(predicate) over all words of length n; ``predicate`` maps an array of
    base-s encoded words to a boolean array."""
    theta = theta.finite()
    s = theta.size
    check_budget(n, s, budget)
    total = s**n
    hist: dict = {}
    for a in range(0, total, CHUNK):
        w = np.arange(a, min(a + CHUNK, total), dtype=np.int64)
        hit = predicate(w)
        codes, counts = np.unique(_compositions(n, s, w[hit]), return_counts=True)
        for c, k in zip(codes, counts):
            hist[int(c)] = hist.get(int(c), 0) + int(k)
    out = theta.zero()
    for code in sorted(hist):
        comp = _decode_comp(code, n, s)
        weight = theta.one()
        for p, c in zip(theta.probs, comp):
            weight *= p**c
        out += hist[code] * weight
    return out
