"""Convergence-speed bounds, bounds on the correction terms, and the
leading-term comparison between m_2^k and a_k.

Quantities with half-integer powers of m_2 are evaluated in float; every
comparison between a rational left side and such a bound allows a relative
slack of ``REL_EPS``.  Everything else stays in the theta's arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .alphabet import Theta
from .exact_dist import enumerate_distribution
from .limit_series import TruncatedSeries, a_limit, b_limit, finite_n_terms, limit_pmf

REL_EPS = 1e-12


def velocity_constant(theta: Theta):
    """C = 2 m_2 / (m_2 - rho^2)."""
    theta = theta.finite()
    m2, rho = theta.moment(2), theta.rho
    return 2 * m2 / (m2 - rho**2)


def decay_ratio(theta: Theta) -> float:
    """m_3 / m_2^{3/2}, which is < 1 for every valid theta."""
    theta = theta.finite()
    return float(theta.moment(3)) / float(theta.moment(2)) ** 1.5


def naive_cdf_factor(theta: Theta) -> float:
    """m_2^{3/2} / (m_3 - m_2^{3/2}); negative whenever m_3 < m_2^{3/2}."""
    theta = theta.finite()
    m2, m3 = float(theta.moment(2)), float(theta.moment(3))
    return m2**1.5 / (m3 - m2**1.5)


def velocity_bound(n: int, k: int, theta: Theta, kind: str = "pmf") -> float:
    """C m_2^{n/2} (m_3/m_2^{3/2})^k for the pmf.

    ``kind="cdf"`` sums the pmf bound over overlaps >= k, i.e. multiplies
    by 1/(1 - m_3/m_2^{3/2}) = m_2^{3/2}/(m_2^{3/2} - m_3).
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if n < 4 * k:
        raise ValueError(f"velocity bound needs n >= 4k, got n={n}, k={k}")
    theta = theta.finite()
    C = float(velocity_constant(theta))
    r = decay_ratio(theta)
    b = C * float(theta.moment(2)) ** (n / 2) * r**k
    if kind == "pmf":
        return b
    if kind == "cdf":
        return b / (1 - r)
    raise ValueError(f"unknown kind {kind!r}")


@dataclass
class BoundCell:
    theta: str
    n: int
    k: int
    measured: float  # |P(S_n=k) - series value|
    series_error: float  # tail bound of the limit series
    bound: float
    ratio: float
    passed: bool


@dataclass
class BoundReport:
    kind: str
    cells: list = field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        return max((c.ratio for c in self.cells), default=0.0)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cells)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "max_ratio": self.max_ratio,
            "cells": [asdict(c) for c in self.cells],
        }


def velocity_report(thetas, n_max: int = 14, kind: str = "pmf", k_min: int = 1, tol=1e-12, budget=None) -> BoundReport:
    """Compare |P(S_n = k) - lim P(S_n = k)| with the velocity bound on the
    grid 4 <= n <= n_max, k_min <= k <= n/4.

    A cell passes when ``measured + series_error <= bound``, i.e. the bound
    dominates the distance to every point the limit could be at.
    """
    report = BoundReport(kind=kind)
    for theta in thetas:
        theta = theta.finite()
        limits: dict = {}
        for n in range(max(4, 4 * k_min), n_max + 1):
            dist = enumerate_distribution(n, theta, budget=budget)
            for k in range(k_min, n // 4 + 1):
                if kind == "pmf":
                    if k not in limits:
                        limits[k] = limit_pmf(k, theta, tol=tol, budget=budget)
                    lim: TruncatedSeries = limits[k]
                    exact = dist.pmf[k]
                else:
                    lim = _cdf_limit(k, theta, tol, budget, limits)
                    exact = dist.tail(k)
                measured = abs(float(exact - lim.value))
                err = float(lim.tail_bound)
                bound = velocity_bound(n, k, theta, kind)
                report.cells.append(
                    BoundCell(
                        theta=str(theta),
                        n=n,
                        k=k,
                        measured=measured,
                        series_error=err,
                        bound=bound,
                        ratio=(measured + err) / bound,
                        passed=measured + err <= bound * (1 + REL_EPS),
                    )
                )
    return report


def _cdf_limit(k, theta, tol, budget, cache):
    from .limit_series import limit_cdf_tail

    key = ("cdf", k)
    if key not in cache:
        if k == 0:
            cache[key] = TruncatedSeries(theta.one(), 0, theta.zero(), "trivial")
        else:
            cache[key] = limit_cdf_tail(k, theta, tol=tol, budget=budget)
    return cache[key]


# ---------------------------------------------------------------------------
# bounds on a_{k,n}, b_{k,n}, a_k, b_k


@dataclass
class BoundCheck:
    name: str
    lhs: float  # best estimate of the left side
    lhs_upper: float  # certified upper end of the left side
    lhs_lower: float  # certified lower end of the left side
    rhs: float
    slack: float  # rhs - lhs_upper
    status: str  # "holds", "violated" or "undecided"

    @property
    def passed(self) -> bool:
        return self.status == "holds"


def _check(name: str, lo, hi, rhs) -> BoundCheck:
    lo, hi, rhs = float(lo), float(hi), float(rhs)
    tol = REL_EPS * max(abs(rhs), 1e-300)
    if hi <= rhs + tol:
        status = "holds"
    elif lo > rhs + tol:
        status = "violated"
    else:
        status = "undecided"
    return BoundCheck(name, (lo + hi) / 2 if lo != hi else lo, hi, lo, rhs, rhs - hi, status)


def correction_rhs(k: int, n: int | None, theta: Theta) -> dict:
    """Right-hand sides of the four correction-term bounds."""
    theta = theta.finite()
    m2, m3, m4 = (theta.moment(q) for q in (2, 3, 4))
    rho = theta.rho
    out = {
        "a_k": m2 ** (k + 1) / (1 - m2),
        "b_k": m4 ** (k + 1) / (1 - m2),
    }
    if n is not None:
        out["a_kn"] = (m2 ** (k + 1) - m2**n) / (1 - m2)
        out["b_kn"] = float(m4 ** (k + 1) / (1 - m2)) + 2 * float(m2) ** (n / 2 + 1) / float(m2 - rho**2) * decay_ratio(theta) ** k
    return out


def correction_check(k: int, n: int, theta: Theta, tol=1e-12, budget=None) -> list[BoundCheck]:
    """Evaluate both sides of the four bounds; a_k and b_k come from their
    truncated series, so their left sides are intervals."""
    theta = theta.finite()
    rhs = correction_rhs(k, n, theta)
    a_kn, b_kn = finite_n_terms(k, n, theta, budget=budget)
    ak = a_limit(k, theta, tol=tol, budget=budget)
    bk = b_limit(k, theta, tol=tol, budget=budget)
    return [
        _check("a_kn <= (m2^(k+1) - m2^n)/(1-m2)", a_kn, a_kn, rhs["a_kn"]),
        _check("b_kn <= m4^(k+1)/(1-m2) + 2 m2^(n/2+1)/(m2-rho^2) (m3/m2^1.5)^k", b_kn, b_kn, rhs["b_kn"]),
        _check("a_k <= m2^(k+1)/(1-m2)", ak.value, ak.value + ak.tail_bound, rhs["a_k"]),
        _check("b_k <= m4^(k+1)/(1-m2)", bk.value, bk.value + bk.tail_bound, rhs["b_k"]),
    ]


def example1_rhs(k: int, n: int, theta: Theta) -> dict:
    """Two-letter specializations, written with p_1, p_2 as printed."""
    theta = theta.finite()
    if theta.size != 2:
        raise ValueError("two-letter specialization needs a 2-letter theta")
    p1, p2 = (float(p) for p in theta.probs)
    s2, s3, s4 = p1**2 + p2**2, p1**3 + p2**3, p1**4 + p2**4
    return {
        "a_kn": (s2 ** (k + 1) + s2**n) / (1 - s2),
        "b_kn": s4 ** (k + 1) / (1 - s2) + 2 * s2 ** (n + 1) / p2**2 * (s3 / s2**1.5) ** k,
        "a_k": s2 ** (k + 1) / (1 - s2),
        "b_k": s4 ** (k + 1) / (1 - s2),
    }


def example2_rhs(k: int, n: int, s: int) -> dict:
    """Uniform specializations, as printed."""
    return {
        "a_kn": s ** (n - k) / (s**n * (s - 1)),
        "b_kn": (s ** -(3 * k + 2) + 2 * s ** (-(n + k) / 2 + 1)) / (s - 1),
        "a_k": 1 / (s**k * (s - 1)),
        "b_k": s ** -(3 * k + 2) / (s - 1),
    }


def specialization_check(k: int, n: int, theta: Theta, tol=1e-12, budget=None) -> list[BoundCheck]:
    """The printed two-letter or uniform forms of the four bounds."""
    theta = theta.finite()
    if theta.is_uniform:
        rhs, tag = example2_rhs(k, n, theta.size), "uniform"
    elif theta.size == 2:
        rhs, tag = example1_rhs(k, n, theta), "two-letter"
    else:
        return []
    a_kn, b_kn = finite_n_terms(k, n, theta, budget=budget)
    ak = a_limit(k, theta, tol=tol, budget=budget)
    bk = b_limit(k, theta, tol=tol, budget=budget)
    return [
        _check(f"{tag} a_kn", a_kn, a_kn, rhs["a_kn"]),
        _check(f"{tag} b_kn", b_kn, b_kn, rhs["b_kn"]),
        _check(f"{tag} a_k", ak.value, ak.value + ak.tail_bound, rhs["a_k"]),
        _check(f"{tag} b_k", bk.value, bk.value + bk.tail_bound, rhs["b_k"]),
    ]


# ---------------------------------------------------------------------------
# leading term


def sandwich_A(k: int, theta: Theta):
    """A(k) = m_4^k/(1-m_4) (m_4 + 1/(1-m_2))."""
    theta = theta.finite()
    m2, m4 = theta.moment(2), theta.moment(4)
    return m4**k / (1 - m4) * (m4 + 1 / (1 - m2))


def sandwich(k: int, theta: Theta):
    """(lower, upper) = (m_2^{k+1}/(1-m_2) - A(k), m_2^{k+1}/(1-m_2))."""
    theta = theta.finite()
    m2 = theta.moment(2)
    upper = m2 ** (k + 1) / (1 - m2)
    return upper - sandwich_A(k, theta), upper


def strict_upper(k: int, theta: Theta):
    """An upper bound on a_k strictly below m_2^{k+1}/(1-m_2).

    Each a_k term P(R_{2i}(i) minus ...) is m_2^i minus at least the mass of
    the constant words, which carry borders of every length; summing
    p^{2i} over i > k gives p^{2k+2}/(1-p^2) per letter.
    """
    theta = theta.finite()
    m2 = theta.moment(2)
    constant = sum((p ** (2 * k + 2) / (1 - p**2) for p in theta.probs), theta.zero())
    return m2 ** (k + 1) / (1 - m2) - constant


def analytic_k0(theta: Theta, k_cap: int = 100_000):
    """Smallest k with m_2^{k+1}/(1-m_2) - A(k) > m_2^k (None if m_2 <= 1/2).

    The condition is (m_2/(1-m_2) - 1) m_2^k > A(k); since m_4 < m_2 the
    ratio A(k)/m_2^k decreases, so the first k found holds for all larger k.
    """
    theta = theta.finite()
    m2 = theta.moment(2)
    if m2 <= Fraction(1, 2):
        return None
    for k in range(1, k_cap + 1):
        lower, _ = sandwich(k, theta)
        if lower > m2**k:
            return k
    return None


def example1_k0(theta: Theta) -> float:
    """|log((1-m_4)^2/(2 m_2 - 1))| / |log(m_4/m_2)| for two letters, as printed."""
    theta = theta.finite()
    m2, m4 = float(theta.moment(2)), float(theta.moment(4))
    return abs(math.log((1 - m4) ** 2 / (2 * m2 - 1))) / abs(math.log(m4 / m2))


@dataclass
class LeadTermRow:
    k: int
    m2k: object
    lower: object
    upper: object
    strict_upper: object
    a_k: float | None = None
    a_k_tail: float | None = None
    certified_m2k_above: bool = False
    observed: str | None = None  # "m2^k > a_k", "a_k > m2^k" or None if unresolved


@dataclass
class LeadTermReport:
    theta: str
    m2: object
    case: str  # "m2 <= 1/2" or "m2 > 1/2"
    rows: list
    a1_below_m2: bool | None = None
    a1_certificate: str | None = None
    k0_analytic: int | None = None
    k0_example1: float | None = None
    k0_observed: int | None = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, Fraction):
                return float(v)
            return v

        d = asdict(self)
        d["m2"] = enc(self.m2)
        d["rows"] = [{k: enc(v) for k, v in asdict(r).items()} for r in self.rows]
        return d


def leadterm_analysis(theta: Theta, k_max: int, series_k_max: int = 0, tol=1e-12, budget=None) -> LeadTermReport:
    """Which of m_2^k and a_k dominates.

    For m_2 <= 1/2 every k <= k_max is certified from the strict upper bound
    alone.  For m_2 > 1/2, a_1 < m_2 is certified from a_1 <= p_1 (1 - m_2)
    and k_0 is read off the sandwich.  With ``series_k_max > 0`` the a_k
    series is also evaluated for k <= series_k_max and compared numerically.
    """
    theta = theta.finite()
    m2 = theta.moment(2)
    case = "m2 <= 1/2" if m2 <= Fraction(1, 2) else "m2 > 1/2"
    rows = []
    for k in range(1, k_max + 1):
        lower, upper = sandwich(k, theta)
        su = strict_upper(k, theta)
        row = LeadTermRow(k=k, m2k=m2**k, lower=lower, upper=upper, strict_upper=su)
        row.certified_m2k_above = su < m2**k
        if k <= series_k_max:
            s = a_limit(k, theta, tol=tol, budget=budget)
            row.a_k, row.a_k_tail = float(s.value), float(s.tail_bound)
            if s.value + s.tail_bound < m2**k:
                row.observed = "m2^k > a_k"
            elif s.value > m2**k:
                row.observed = "a_k > m2^k"
        rows.append(row)
    rep = LeadTermReport(theta=str(theta), m2=m2, case=case, rows=rows)
    if case == "m2 > 1/2":
        # a_1 <= p_1 (1 - m_2) < 1 - m_2 < m_2
        cert = theta.p1 * (1 - m2)
        rep.a1_below_m2 = cert < m2
        rep.a1_certificate = f"a_1 <= p_1(1-m_2) = {float(cert):.6g} < m_2 = {float(m2):.6g}"
        rep.k0_analytic = analytic_k0(theta)
        if theta.size == 2:
            rep.k0_example1 = example1_k0(theta)
        for r in rows:
            if r.observed == "a_k > m2^k":
                rep.k0_observed = r.k
                break
    return rep
