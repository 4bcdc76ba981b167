"""Finite-n correction terms and the limiting law of S_n.

For ``n >= 2k``::

    P(S_n >= k) = m_2^k + a_{k,n}        P(S_n = k) = m_2^k - b_{k,n}

and as ``n -> oo`` the corrections converge to ``a_k`` and ``b_k``.  The
limits are series over word length ``i``; their terms are level masses

    a_k = sum_{i > k} sum_{j < k} D_2(i, j)       b_k = sum_{i > k} D_2(i, k)

because ``R_{2i}(i)`` is the set of squares ``ww`` and ``ww`` has a border
``j < i`` exactly when ``w`` does.  The series are truncated at a word
length ``I`` picked from a geometric bound on the remaining terms, so the
reported ``tail_bound`` is a certificate, not an estimate.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from fractions import Fraction

from .alphabet import Theta
from .exact_dist import DEFAULT_BUDGET, BudgetExceeded, check_budget, level_row, union_prob

log = logging.getLogger(__name__)


def _r(lo: int, hi: int) -> range:
    return range(lo, hi + 1)


def _split(n: int, k: int) -> int:
    """First overlap length counted in the 'large overlap' union."""
    return max(n // 2, k + 1)


def a_term(i: int, k: int, theta: Theta, budget: int | None = None):
    """P(R_{2i}(i) minus the union of R_{2i}(j), k <= j < i), by set algebra."""
    return union_prob(2 * i, [i], theta, minus=_r(k, i - 1), budget=budget)


def b_term(i: int, k: int, theta: Theta, budget: int | None = None):
    """P(R_{2i}(i) cap R_{2i}(k) minus the union of R_{2i}(j), k < j < i)."""
    return union_prob(2 * i, [i], theta, intersect=[k], minus=_r(k + 1, i - 1), budget=budget)


def finite_n_terms(k: int, n: int, theta: Theta, budget: int | None = None):
    """(a_{k,n}, b_{k,n}) evaluated from their set-algebra definitions."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < 2 * k:
        raise ValueError(f"need n >= 2k, got n={n}, k={k}")
    theta = theta.finite()
    L = _split(n, k)
    a = union_prob(n, _r(L, n - 1), theta, minus=_r(k, L - 1), budget=budget)
    b = union_prob(n, _r(L, n - 1), theta, intersect=[k], minus=_r(k + 1, L - 1), budget=budget)
    for i in _r(k + 1, L - 1):
        a += a_term(i, k, theta, budget)
        b += b_term(i, k, theta, budget)
    return a, b


def printed_terms(k: int, n: int, theta: Theta, budget: int | None = None):
    """(a_{k,n}, b_{k,n}) with the split fixed at floor(n/2) and the b series
    running up to floor(n/2).  Kept for comparison only: it disagrees with
    enumeration when n/2 is close to k."""
    if k < 1 or n < 2 * k:
        raise ValueError(f"need k >= 1 and n >= 2k, got n={n}, k={k}")
    theta = theta.finite()
    h = n // 2
    a = union_prob(n, _r(h, n - 1), theta, minus=_r(k, h - 1), budget=budget)
    b = union_prob(n, _r(h, n - 1), theta, intersect=[k], minus=_r(k + 1, h - 1), budget=budget)
    for i in _r(k + 1, h - 1):
        a += a_term(i, k, theta, budget)
    for i in _r(k + 1, h):
        b += b_term(i, k, theta, budget)
    return a, b


@dataclass
class TruncatedSeries:
    value: object
    terms_used: int  # largest word length i included
    tail_bound: object
    bound_source: str
    extra_error: object = 0
    reached_tol: bool = True

    def interval(self) -> tuple[float, float]:
        """Float enclosure ``value -/+ (tail_bound + extra_error)``."""
        v, t = float(self.value), float(self.tail_bound) + float(self.extra_error)
        return v - t, v + t

    def to_json(self) -> dict:
        d = asdict(self)
        for key in ("value", "tail_bound", "extra_error"):
            d[key] = float(d[key])
        if isinstance(self.value, Fraction):
            d["value_exact"] = str(self.value)
        return d


def ratio_check(theta: Theta) -> None:
    """m_3 / m_2^{3/2} < 1 must hold for every valid theta."""
    m2, m3 = theta.moment(2), theta.moment(3)
    if not m3**2 < m2**3:
        raise AssertionError(f"m3^2 = {m3**2} is not below m2^3 = {m2**3}")


def max_length(theta: Theta, budget: int | None = None) -> int:
    """Largest word length whose census fits in the budget."""
    budget = DEFAULT_BUDGET if budget is None else budget
    i = 1
    while theta.size ** (i + 1) <= budget:
        i += 1
    return i


def cdf_tail_bound(k: int, I: int, theta: Theta):
    """Bound on sum_{i > I} of the a_k terms: each is at most P(R_{2i}(i)) = m_2^i."""
    m2 = theta.moment(2)
    return m2 ** (I + 1) / (1 - m2)


def pmf_tail_bound(k: int, I: int, theta: Theta):
    """Bound on sum_{i > I} D_2(i, k).

    For ``i >= 2k`` the term is at most P(R_{2i}(i) cap R_{2i}(k)) =
    m_4^k m_2^{i-2k}; shorter ``i`` fall back to m_2^i.
    """
    m2, m4 = theta.moment(2), theta.moment(4)
    total = theta.zero()
    for i in range(I + 1, 2 * k):
        total += m2**i
    start = max(I + 1, 2 * k)
    return total + m4**k * m2 ** (start - 2 * k) / (1 - m2)


def _pick_terms(bound, k: int, theta: Theta, tol, lo: int, cap: int) -> tuple[int, bool]:
    I = lo
    while I < cap and bound(k, I, theta) > tol:
        I += 1
    return I, bound(k, I, theta) <= tol


def _prepare(theta: Theta, tol, terms, budget, lo, bound, k):
    theta = theta.finite()
    ratio_check(theta)
    if terms is not None:
        check_budget(terms, theta.size, budget)
        return theta, terms, True
    cap = max_length(theta, budget)
    if theta.exact:
        tol = Fraction(tol)
    I, ok = _pick_terms(bound, k, theta, tol, lo, max(cap, lo))
    if not ok:
        log.warning("tolerance %.3g unreachable for k=%d within budget; stopping at i=%d", float(tol), k, I)
    return theta, I, ok


def limit_cdf_tail(k: int, theta: Theta, tol=1e-9, terms: int | None = None, budget: int | None = None, threads: int = 1) -> TruncatedSeries:
    """lim P(S_n >= k) = m_2^k + a_k, truncated after word length ``terms``.

    ``terms=None`` picks the smallest length meeting ``tol`` within budget.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    extra = theta.tail_mass
    theta, I, ok = _prepare(theta, tol, terms, budget, k, cdf_tail_bound, k)
    m2 = theta.moment(2)
    value = m2**k
    for i in range(k + 1, I + 1):
        row = level_row(i, 2, theta, budget, threads)
        value += sum(row[:k], theta.zero())
    return TruncatedSeries(
        value=value,
        terms_used=I,
        tail_bound=cdf_tail_bound(k, I, theta),
        bound_source="sum_{i>I} m_2^i (cdf, a_k <= m_2^{k+1}/(1-m_2) machinery)",
        extra_error=extra,
        reached_tol=ok,
    )


def limit_pmf(k: int, theta: Theta, tol=1e-9, terms: int | None = None, budget: int | None = None, threads: int = 1) -> TruncatedSeries:
    """lim P(S_n = k) = m_2^k - b_k for k >= 1; k = 0 is delegated to the
    zero-overlap series."""
    if k == 0:
        from .zero_words import limit_zero

        return limit_zero(theta, tol=tol, terms=terms, budget=budget, threads=threads)
    if k < 0:
        raise ValueError("k must be >= 0")
    extra = theta.tail_mass
    theta, I, ok = _prepare(theta, tol, terms, budget, k, pmf_tail_bound, k)
    m2 = theta.moment(2)
    value = m2**k
    for i in range(k + 1, I + 1):
        value -= level_row(i, 2, theta, budget, threads)[k]
    return TruncatedSeries(
        value=value,
        terms_used=I,
        tail_bound=pmf_tail_bound(k, I, theta),
        bound_source="sum_{i>I} m_4^k m_2^{i-2k} (P(R_2i(i) cap R_2i(k)) = m_4^k m_2^{i-2k})",
        extra_error=extra,
        reached_tol=ok,
    )


def a_limit(k: int, theta: Theta, **kw) -> TruncatedSeries:
    """a_k alone (the cdf series minus its leading m_2^k)."""
    s = limit_cdf_tail(k, theta, **kw)
    s.value = s.value - theta.finite().moment(2) ** k
    return s


def b_limit(k: int, theta: Theta, **kw) -> TruncatedSeries:
    s = limit_pmf(k, theta, **kw)
    s.value = theta.finite().moment(2) ** k - s.value
    return s


__all__ = [
    "BudgetExceeded",
    "TruncatedSeries",
    "a_limit",
    "a_term",
    "b_limit",
    "b_term",
    "cdf_tail_bound",
    "finite_n_terms",
    "limit_cdf_tail",
    "limit_pmf",
    "max_length",
    "pmf_tail_bound",
    "printed_terms",
]
