"""Unbordered words: P(S_n = 0), its recursion, its limit, exact counts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .alphabet import Theta
from .exact_dist import level_row
from .limit_series import TruncatedSeries, finite_n_terms, max_length

ZERO_CAP = 100_000


def p_zero(n: int, theta: Theta, budget: int | None = None):
    """P(S_n = 0) = 1 - m_2 - a_{1,n} for n >= 2 (1 for n = 1)."""
    theta = theta.finite()
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return theta.one()
    a, _ = finite_n_terms(1, n, theta, budget=budget)
    return 1 - theta.moment(2) - a


def unbordered_count(n_max: int, s: int) -> list[int]:
    """u(n) = number of unbordered words of length n over s letters, n = 1..n_max.

    Index 0 of the returned list is u(1).  Uses
    u(2n) = s^2 u(2n-2) - u(n) and u(2n+1) = s u(2n).
    """
    if s < 2:
        raise ValueError("alphabet size must be >= 2")
    if n_max < 1:
        return []
    u = [0, s, s * s - s]  # u[0] unused
    for n in range(3, n_max + 1):
        if n % 2:
            u.append(s * u[n - 1])
        else:
            u.append(s * s * u[n - 2] - u[n // 2])
    return u[1 : n_max + 1]


@dataclass
class ZeroSequence:
    values: dict  # n -> P(S_n = 0)
    producer: str
    theta: Theta

    def check(self) -> None:
        ns = sorted(self.values)
        for n in ns:
            if n % 2 == 0 and n + 1 in self.values and self.values[n + 1] != self.values[n]:
                raise AssertionError(f"P(S_{n + 1}=0) != P(S_{n}=0)")
            if n % 2 == 0 and n + 2 in self.values and not self.values[n + 2] < self.values[n]:
                raise AssertionError(f"P(S_{n}=0) is not decreasing at n={n}")


def zero_recursion(n_max: int, theta: Theta, budget: int | None = None) -> ZeroSequence:
    """P(S_n = 0) for 1 <= n <= n_max from
    P(S_{2n}=0) = P(S_{2n-2}=0) - D_2(n, 0) and P(S_{2n+1}=0) = P(S_{2n}=0).

    Uniform thetas use the exact unbordered counts; otherwise each D_2(n, 0)
    is enumerated, so ``n_max / 2`` must fit in the budget.
    """
    theta = theta.finite()
    vals = {1: theta.one()}
    if n_max >= 2:
        vals[2] = 1 - theta.moment(2)
    if theta.is_uniform:
        u = unbordered_count(max(n_max // 2, 1), theta.size)
        d2 = {i: u[i - 1] * theta.probs[0] ** (2 * i) for i in range(1, len(u) + 1)}
    else:
        d2 = {}
    for n in range(3, n_max + 1):
        if n % 2:
            vals[n] = vals[n - 1]
        else:
            h = n // 2
            if h not in d2:
                d2[h] = level_row(h, 2, theta, budget)[0]
            vals[n] = vals[n - 2] - d2[h]
    return ZeroSequence(values=vals, producer="recursion", theta=theta)


def zero_tail_bound(I: int, theta: Theta):
    """sum_{i > I} D_2(i, 0) <= sum_{i > I} m_2^i."""
    m2 = theta.moment(2)
    return m2 ** (I + 1) / (1 - m2)


def limit_zero(theta: Theta, tol=1e-9, terms: int | None = None, budget: int | None = None, threads: int = 1) -> TruncatedSeries:
    """lim P(S_n = 0) = 1 - m_2 - sum_{i >= 2} D_2(i, 0), truncated after i = terms."""
    extra = theta.tail_mass
    theta = theta.finite()
    if terms is None:
        cap = ZERO_CAP if theta.is_uniform else max_length(theta, budget)
        t = Fraction(tol) if theta.exact else tol
        I = 2
        while I < cap and zero_tail_bound(I, theta) > t:
            I += 1
        ok = zero_tail_bound(I, theta) <= t
    else:
        I, ok = terms, True
    value = 1 - theta.moment(2)
    if theta.is_uniform:
        u = unbordered_count(I, theta.size)
        p = theta.probs[0]
        for i in range(2, I + 1):
            value -= u[i - 1] * p ** (2 * i)
    else:
        for i in range(2, I + 1):
            value -= level_row(i, 2, theta, budget, threads)[0]
    return TruncatedSeries(
        value=value,
        terms_used=I,
        tail_bound=zero_tail_bound(I, theta),
        bound_source="sum_{i>I} m_2^i (D_2(i,0) <= m_2^i)",
        extra_error=extra,
        reached_tol=ok,
    )


def zero_lower_bound(theta: Theta):
    """(1 - p_1)(1 - m_2), the strict lower bound on lim P(S_n = 0)."""
    theta = theta.finite()
    return (1 - theta.p1) * (1 - theta.moment(2))


def zero_bound_margin(series: TruncatedSeries, theta: Theta):
    """Worst-case margin of the limit over the lower bound, tail included.

    The series value is an upper estimate (omitted terms are subtracted), so
    the limit is at least ``value - tail_bound``.
    """
    return series.value - series.tail_bound - zero_lower_bound(theta)


def folded_uniform_limit(s: int, terms: int) -> Fraction:
    """(s-1)/s - sum_{i >= 2} P(S_i = 0)/s^i with odd/even pairs merged via
    P(S_{2i+1}=0) = P(S_{2i}=0):  (s-1)/s - (s+1)/s * sum_{i >= 1} P(S_{2i}=0)/s^{2i}.

    Truncated after i = terms (so word lengths up to 2*terms+1).
    """
    u = unbordered_count(2 * terms, s)
    total = Fraction(s - 1, s)
    acc = Fraction(0)
    for i in range(1, terms + 1):
        pz = Fraction(u[2 * i - 1], s ** (2 * i))
        acc += pz / Fraction(s) ** (2 * i)
    return total - Fraction(s + 1, s) * acc

