"""Property suite behind ``selfoverlap verify``.

Each check returns a :class:`CheckResult`; a profile fixes the sizes.  The
quick profile is the property suite plus the cheap oracle cross-checks at
n <= 10.  The full profile extends every exhaustive check to n <= 14 and adds
parity, the correction-term bounds, the leading-term comparison, the
convergence-speed grid and the step coupling.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import border_core as bc
from .alphabet import Theta, from_probs, uniform
from .bounds import leadterm_analysis, correction_check, specialization_check, velocity_report
from .exact_dist import census, census_for, enumerate_distribution, level_row, union_prob, word_mass
from .montecarlo import step_coupling_exact
from .limit_series import a_term, b_term, finite_n_terms
from .zero_words import limit_zero, p_zero, unbordered_count, zero_bound_margin, zero_recursion

MAX_FAILURES = 5


@dataclass
class Profile:
    name: str
    n_max: int
    ternary_max: int
    reduction_max: int
    unbordered_max: int
    moment_j: int = 10
    random_words: int = 1000
    extended: bool = False


QUICK = Profile("quick", n_max=10, ternary_max=7, reduction_max=5, unbordered_max=12)
FULL = Profile("full", n_max=14, ternary_max=9, reduction_max=7, unbordered_max=16, random_words=100_000, extended=True)


def default_thetas() -> list[Theta]:
    return [uniform(2), uniform(3), from_probs(["0.7", "0.3"])]


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    seconds: float = 0.0


class _Tally:
    def __init__(self, name: str):
        self.name = name
        self.cases = 0
        self.failures: list[str] = []
        self.nfail = 0
        self.notes: list[str] = []
        self.t0 = time.perf_counter()

    def expect(self, ok: bool, what) -> None:
        self.cases += 1
        if not ok:
            self.nfail += 1
            if len(self.failures) < MAX_FAILURES:
                self.failures.append(what() if callable(what) else str(what))

    def result(self) -> CheckResult:
        fails = list(self.failures)
        if self.nfail > len(fails):
            fails.append(f"... {self.nfail - len(fails)} more")
        return CheckResult(self.name, self.nfail == 0, self.cases, fails, self.notes, round(time.perf_counter() - self.t0, 3))


def _digits(n: int, s: int, w: np.ndarray) -> np.ndarray:
    """Letters of base-s encoded words, first letter in column 0."""
    out = np.empty((w.size, n), dtype=np.int64)
    rest = w.copy()
    for col in range(n - 1, -1, -1):
        out[:, col] = rest % s
        rest //= s
    return out


def _periodic_any(n: int, s: int, periods) -> callable:
    def pred(w):
        x = _digits(n, s, w)
        hit = np.zeros(w.size, dtype=bool)
        for j in periods:
            hit |= np.all(x[:, : n - j] == x[:, j:], axis=1)
        return hit

    return pred


# ---------------------------------------------------------------------------
# word-level checks


def check_prefix_function(p: Profile) -> CheckResult:
    t = _Tally("prefix function vs naive border scan")
    for s, nmax in ((2, min(p.n_max, 12)), (3, p.ternary_max)):
        for n in range(1, nmax + 1):
            for w in itertools.product(range(s), repeat=n):
                t.expect(
                    bc.max_overlap(w) == bc.naive_max_overlap(w) and bc.borders(w) == bc.naive_borders(w),
                    lambda w=w: f"word {bc.format_word(w)}",
                )
    rng = random.Random(12345)
    for _ in range(p.random_words):
        s = rng.randint(2, 4)
        n = rng.randint(13, 40)
        # low-entropy words so long borders actually occur
        w = tuple(rng.choice((0, 0, 0, 1)) if s == 2 else rng.randrange(s) for _ in range(n))
        t.expect(bc.borders(w) == bc.naive_borders(w), lambda w=w: f"word {bc.format_word(w)}")
    return t.result()


def check_duality(p: Profile) -> CheckResult:
    t = _Tally("duality B_n(n-k) = R_n(k)")
    for s, nmax in ((2, p.n_max), (3, p.ternary_max)):
        for n in range(2, nmax + 1):
            for w in itertools.product(range(s), repeat=n):
                for k in range(1, n):
                    t.expect(bc.in_B(w, n - k) == bc.in_R(w, k), lambda w=w, k=k: f"{bc.format_word(w)} k={k}")
    return t.result()


# ---------------------------------------------------------------------------
# property suite


def check_moments(p: Profile) -> CheckResult:
    t = _Tally("moment inequalities m_{qp} <= m_q^p, rho^2 <= m_2")
    thetas = default_thetas() + [from_probs(["0.9", "0.1"]), from_probs(["1/2", "1/3", "1/6"])]
    for th in thetas:
        for q in range(1, 6):
            for e in range(1, 6):
                t.expect(th.moment(q * e) <= th.moment(q) ** e, f"{th} q={q} p={e}")
        t.expect(th.rho**2 <= th.moment(2), f"{th} rho")
    return t.result()


def check_power_moments(p: Profile) -> CheckResult:
    t = _Tally("sum_w P(w)^l = m_l^j")
    for th in default_thetas():
        for j in range(1, p.moment_j + 1):
            cen = census_for(j, th, kind="overlap")
            for ell in (2, 3, 4):
                got = sum(cen.by_overlap(th, ell), th.zero())
                t.expect(got == th.moment(ell) ** j, f"{th} j={j} l={ell}: {got}")
    return t.result()


def check_central_cut(p: Profile, thetas=None) -> CheckResult:
    t = _Tally("central letters can be cut")
    for th in thetas or default_thetas():
        for n in range(4, _cap(p, th) + 1):
            h = n // 2
            for k in range(1, h):
                lhs = union_prob(n, range(k, h), th)
                rhs = union_prob(2 * (h - 1), range(k, h), th)
                t.expect(lhs == rhs, f"{th} n={n} k={k}: {lhs} != {rhs}")
    return t.result()


def check_large_overlaps(p: Profile, thetas=None) -> CheckResult:
    t = _Tally("large overlaps: periodic-union identity and (n/2) m_2^{floor(n/2)} bound")
    for th in thetas or default_thetas():
        m2 = th.moment(2)
        for n in range(2, _cap(p, th) + 1):
            h = n // 2
            big = union_prob(n, range(h, n), th)
            per = word_mass(n, th, _periodic_any(n, th.size, range(1, n - h + 1)))
            t.expect(big == per, f"{th} n={n}: {big} != {per}")
            t.expect(big <= Fraction(n, 2) * m2**h, f"{th} n={n}: bound")
    return t.result()


def check_short_border(p: Profile) -> CheckResult:
    t = _Tally("a bordered word has a border of length <= ceil(n/2)")
    for s, nmax in ((2, p.n_max), (3, p.ternary_max)):
        for n in range(2, nmax + 1):
            low = sum(1 << k for k in range(1, (n + 1) // 2 + 1))
            for mask in census(n, s, compositions=False).keys:
                t.expect(bool(mask) == bool(mask & low), f"s={s} n={n} mask={mask:b}")
    return t.result()


def _cap(p: Profile, th: Theta) -> int:
    return p.n_max if th.size == 2 or p.extended else min(p.n_max, p.ternary_max + 1)


# ---------------------------------------------------------------------------
# finite-n formulas


def check_theorem31(p: Profile, thetas=None) -> CheckResult:
    t = _Tally("m_2^k + a_{k,n} and m_2^k - b_{k,n} match enumeration")
    for th in thetas or default_thetas():
        m2 = th.moment(2)
        for n in range(2, _cap(p, th) + 1):
            d = enumerate_distribution(n, th)
            for k in range(1, n // 2 + 1):
                a, b = finite_n_terms(k, n, th)
                t.expect(m2**k + a == d.tail(k), f"{th} n={n} k={k} tail")
                t.expect(m2**k - b == d.pmf[k], f"{th} n={n} k={k} pmf")
    return t.result()


def check_parity(p: Profile, thetas=None) -> CheckResult:
    t = _Tally("P(S_2n >= k) = P(S_2n+1 >= k) and P(S_2n = k) = P(S_2n+1 = k), 4k <= 2n")
    for th in thetas or default_thetas():
        for n2 in range(2, _cap(p, th) + 1, 2):
            d0, d1 = enumerate_distribution(n2, th), enumerate_distribution(n2 + 1, th)
            for k in range(1, n2 // 4 + 1):
                t.expect(d0.tail(k) == d1.tail(k), lambda: f"{th} 2n={n2} k={k} tail {d0.tail(k)} vs {d1.tail(k)}")
                t.expect(d0.pmf[k] == d1.pmf[k], lambda: f"{th} 2n={n2} k={k} pmf {d0.pmf[k]} vs {d1.pmf[k]}")
    return t.result()


def check_reductions(p: Profile) -> CheckResult:
    t = _Tally("square-word terms reduce to level masses")
    thetas = [uniform(2), from_probs(["0.7", "0.3"]), uniform(3), from_probs(["1/2", "1/3", "1/6"])]
    for th in thetas:
        imax = p.reduction_max if th.size == 2 else min(p.reduction_max, (p.ternary_max + 5) // 2)
        for i in range(2, imax + 1):
            row = level_row(i, 2, th)
            for k in range(1, i):
                t.expect(a_term(i, k, th) == sum(row[:k], th.zero()), f"{th} i={i} k={k} a")
                t.expect(b_term(i, k, th) == row[k], f"{th} i={i} k={k} b")
    return t.result()


def check_zero(p: Profile, thetas=None) -> CheckResult:
    t = _Tally("P(S_n = 0): closed form, recursion, parity, monotonicity")
    for th in thetas or default_thetas():
        cap = _cap(p, th)
        seq = zero_recursion(cap, th)
        for n in range(2, cap + 1):
            d0 = enumerate_distribution(n, th).pmf[0]
            t.expect(p_zero(n, th) == d0, f"{th} n={n} closed form")
            t.expect(seq.values[n] == d0, f"{th} n={n} recursion")
        try:
            seq.check()
            t.expect(True, "")
        except AssertionError as e:
            t.expect(False, f"{th}: {e}")
    return t.result()


def check_unbordered(p: Profile) -> CheckResult:
    t = _Tally("unbordered counts from the recursion")
    t.expect(unbordered_count(6, 2) == [2, 2, 4, 6, 12, 20], "u(1..6) for s=2")
    for s, nmax in ((2, p.unbordered_max), (3, p.ternary_max)):
        u = unbordered_count(nmax, s)
        for n in range(1, nmax + 1):
            brute = census(n, s, compositions=False, kind="overlap").count(lambda k: k == 0) if n > 1 else s
            t.expect(u[n - 1] == brute, f"s={s} n={n}: {u[n - 1]} vs {brute}")
    return t.result()


# ---------------------------------------------------------------------------
# limits and bounds (full profile)


def check_zero_limit(p: Profile) -> CheckResult:
    t = _Tally("lim P(S_n = 0) above (1 - p_1)(1 - m_2)")
    for th in default_thetas():
        series = limit_zero(th, tol=1e-9, budget=3**13)
        margin = zero_bound_margin(series, th)
        t.expect(margin > 0, f"{th}: margin {float(margin):.3g}")
        t.notes.append(f"{th}: limit {float(series.value):.10f}, tail {float(series.tail_bound):.2g}, margin {float(margin):.4g}")
    return t.result()


def check_correction_bounds(p: Profile, n_max: int = 14, budget: int = 3**14) -> CheckResult:
    t = _Tally("correction-term bounds and their two-letter / uniform forms")
    counts: dict = {}
    for th in default_thetas():
        for n in range(2, n_max + 1):
            for k in range(1, n // 2 + 1):
                for c in correction_check(k, n, th, tol=1e-9, budget=budget) + specialization_check(k, n, th, tol=1e-9, budget=budget):
                    key = f"{th} {c.name.split(' <=')[0]}"
                    counts.setdefault(key, {"holds": 0, "violated": 0, "undecided": 0})[c.status] += 1
                    t.expect(c.passed, lambda c=c: f"{th} n={n} k={k} {c.name}: lhs {c.lhs:.6g} rhs {c.rhs:.6g} ({c.status})")
    t.notes.extend(f"{key}: {v}" for key, v in sorted(counts.items()))
    return t.result()


def check_leadterm(p: Profile) -> CheckResult:
    t = _Tally("leading term m_2^k against a_k")
    for th in (uniform(2), uniform(3)):
        rep = leadterm_analysis(th, 10)
        for r in rep.rows:
            t.expect(r.certified_m2k_above, f"{th} k={r.k}")
    rep = leadterm_analysis(from_probs(["0.9", "0.1"]), 10)
    t.expect(bool(rep.a1_below_m2), "(0.9,0.1): a_1 < m_2")
    t.expect(rep.k0_analytic is not None and rep.k0_analytic <= 8, f"(0.9,0.1): k0 = {rep.k0_analytic}")
    t.notes.append(f"(0.9,0.1): {rep.a1_certificate}; k0 = {rep.k0_analytic}, two-letter formula {rep.k0_example1:.3f}")
    return t.result()


def check_velocity(p: Profile) -> CheckResult:
    t = _Tally("|P(S_n = k) - limit| within C m_2^{n/2} (m_3/m_2^{3/2})^k")
    rep = velocity_report(default_thetas(), n_max=p.n_max, tol=1e-9, budget=3**14)
    for c in rep.cells:
        t.expect(c.passed, f"{c.theta} n={c.n} k={c.k} ratio {c.ratio:.3g}")
    t.notes.append(f"max ratio {rep.max_ratio:.4f} over {len(rep.cells)} cells")
    return t.result()


def check_coupling(p: Profile) -> CheckResult:
    t = _Tally("P(S_{n+1} = S_n + 1) between min p and rho")
    for s in (2, 3):
        for n in range(2, 9 if s == 2 else 7):
            v = step_coupling_exact(n, uniform(s))
            t.expect(v == Fraction(1, s), f"uniform({s}) n={n}: {v}")
    th = from_probs(["0.7", "0.3"])
    vals = [step_coupling_exact(n, th) for n in range(1, 9)]
    for n, v in enumerate(vals, start=1):
        t.expect(min(th.probs) <= v <= th.rho, f"{th} n={n}: {v}")
    t.notes.append(f"{th}: " + ", ".join(f"n={n}: {v}" for n, v in enumerate(vals, start=1)) + f"; m_2 = {th.moment(2)}")
    return t.result()


QUICK_CHECKS = [
    check_prefix_function,
    check_duality,
    check_moments,
    check_power_moments,
    check_central_cut,
    check_large_overlaps,
    check_short_border,
    check_theorem31,
    check_reductions,
    check_zero,
    check_unbordered,
]
FULL_ONLY = [check_parity, check_zero_limit, check_correction_bounds, check_leadterm, check_velocity, check_coupling]


@dataclass
class VerifyReport:
    profile: str
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {"profile": self.profile, "passed": self.passed, "checks": [asdict(c) for c in self.checks]}

    def markdown(self) -> str:
        lines = [f"# verify ({self.profile})", "", f"overall: {'PASS' if self.passed else 'FAIL'}", ""]
        lines += ["| check | result | cases |", "|---|---|---|"]
        for c in self.checks:
            lines.append(f"| {c.name} | {'PASS' if c.passed else 'FAIL'} | {c.cases} |")
        for c in self.checks:
            if c.failures or c.notes:
                lines += ["", f"## {c.name}", ""]
                lines += [f"- failure: {f}" for f in c.failures]
                lines += [f"- {n}" for n in c.notes]
        return "\n".join(lines) + "\n"


def run(profile: Profile = QUICK, only=None) -> VerifyReport:
    checks = QUICK_CHECKS + (FULL_ONLY if profile.extended else [])
    if only:
        checks = [c for c in checks if any(o in c.__name__ for o in only)]
    return VerifyReport(profile.name, [c(profile) for c in checks])
