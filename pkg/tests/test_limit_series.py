from __future__ import annotations

import logging
from fractions import Fraction

import pytest

import oracle
from selfoverlap.alphabet import geometric
from selfoverlap.bounds import velocity_bound
from selfoverlap.exact_dist import enumerate_distribution, level_row
from selfoverlap.limit_series import (
    a_limit,
    a_term,
    b_limit,
    b_term,
    cdf_tail_bound,
    finite_n_terms,
    limit_cdf_tail,
    limit_pmf,
    max_length,
    pmf_tail_bound,
)


@pytest.mark.parametrize("name, imax", [("u2", 7), ("biased", 7), ("u3", 7), ("tri", 6)])
def test_square_terms_are_level_masses(name, imax, request):
    th = request.getfixturevalue(name)
    for i in range(2, imax + 1):
        row = level_row(i, 2, th)
        for k in range(1, i):
            assert a_term(i, k, th) == sum(row[:k], Fraction(0))
            assert b_term(i, k, th) == row[k]


def test_level_masses_against_brute_force(biased):
    for i in range(2, 7):
        row = level_row(i, 2, biased)
        assert row == [oracle.level_mass(i, k, biased.probs) for k in range(i)]


def test_finite_terms_errors(u2):
    with pytest.raises(ValueError):
        finite_n_terms(0, 4, u2)
    with pytest.raises(ValueError):
        finite_n_terms(3, 5, u2)


def test_uniform2_limits(u2):
    # values confirmed by the I / I+8 comparison below
    want = {1: 0.300421, 2: 0.198920, 3: 0.112162, 4: 0.059286}
    for k, v in want.items():
        s = limit_pmf(k, u2, tol=1e-6)
        assert s.reached_tol and s.tail_bound <= Fraction(1, 10**6)
        assert abs(float(s.value) - v) < 2e-6
        lo, hi = s.value - s.tail_bound, s.value
        assert lo <= s.value <= hi  # omitted terms only lower the pmf


@pytest.mark.parametrize("k", [1, 2, 3])
def test_certificate_covers_more_terms(u2, biased, k):
    for th in (u2, biased):
        s = limit_pmf(k, th, tol=1e-4)
        t = limit_pmf(k, th, terms=s.terms_used + 6)
        assert 0 <= s.value - t.value <= s.tail_bound
        c = limit_cdf_tail(k, th, tol=1e-4)
        d = limit_cdf_tail(k, th, terms=c.terms_used + 6)
        assert 0 <= d.value - c.value <= c.tail_bound


def test_tail_bounds_dominate_terms(biased):
    m2 = biased.moment(2)
    for k in (1, 2, 3):
        I = 2 * k + 1
        actual = sum((level_row(i, 2, biased)[k] for i in range(I + 1, I + 8)), Fraction(0))
        assert actual <= pmf_tail_bound(k, I, biased)
        actual_a = sum((sum(level_row(i, 2, biased)[:k], Fraction(0)) for i in range(I + 1, I + 8)), Fraction(0))
        assert actual_a <= cdf_tail_bound(k, I, biased)
        assert cdf_tail_bound(k, I, biased) == m2 ** (I + 1) / (1 - m2)


def test_limits_add_up(biased):
    # P(S=0) + sum_{k<=K} P(S=k) + P(S>=K+1) = 1 in the limit
    K = 3
    parts = [limit_pmf(k, biased, tol=1e-4) for k in range(0, K + 1)]
    rest = limit_cdf_tail(K + 1, biased, tol=1e-4)
    total = sum((p.value for p in parts), Fraction(0)) + rest.value
    slack = sum((p.tail_bound for p in parts), Fraction(0)) + rest.tail_bound
    assert abs(total - 1) <= slack


def test_limit_close_to_long_words(u2, biased):
    for th in (u2, biased):
        d = enumerate_distribution(18, th)
        for k in (1, 2, 3):
            s = limit_pmf(k, th, tol=1e-5)
            assert abs(float(d.pmf[k] - s.value)) <= velocity_bound(18, k, th) + float(s.tail_bound)


def test_correction_terms(u2):
    a = a_limit(1, u2, tol=1e-5)
    c = limit_cdf_tail(1, u2, tol=1e-5)
    assert a.value == c.value - Fraction(1, 2)
    b = b_limit(1, u2, tol=1e-5)
    assert b.value == Fraction(1, 2) - limit_pmf(1, u2, tol=1e-5).value
    assert b.value > 0


def test_unreachable_tolerance_is_reported(u2, caplog):
    with caplog.at_level(logging.WARNING):
        s = limit_pmf(2, u2, tol=1e-12, budget=2**12)
    assert not s.reached_tol
    assert s.terms_used == max_length(u2, 2**12) == 12
    assert s.tail_bound > Fraction(1, 10**12)
    assert "unreachable" in caplog.text


def test_argument_checks(u2):
    with pytest.raises(ValueError):
        limit_pmf(-1, u2)
    with pytest.raises(ValueError):
        limit_cdf_tail(0, u2)
    assert limit_pmf(0, u2, terms=30).bound_source.startswith("sum_{i>I} m_2^i")


def test_geometric_reports_truncation_mass():
    th = geometric("1/2", eps="1/64")
    s = limit_pmf(1, th, tol=1e-3)
    assert s.extra_error == Fraction(1, 64)
    lo, hi = s.interval()
    assert hi - lo == pytest.approx(2 * (float(s.tail_bound) + 1 / 64))
