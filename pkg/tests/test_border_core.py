from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from selfoverlap.border_core import (
    border_mask,
    borders,
    first_return,
    format_word,
    in_B,
    in_R,
    max_overlap,
    naive_borders,
    naive_first_return,
    naive_max_overlap,
    parse_word,
    prefix_function,
)


@pytest.mark.parametrize(
    "word, T, S, B",
    [
        ("abab", 2, 2, [2]),
        ("aaaa", 1, 3, [1, 2, 3]),
        ("aab", 3, 0, []),
        ("aabaa", 3, 2, [1, 2]),
        ("abc", 3, 0, []),
        ("a", 1, 0, []),
    ],
)
def test_examples(word, T, S, B):
    w = parse_word(word)
    assert first_return(w) == T
    assert max_overlap(w) == S
    assert borders(w) == B


def test_membership():
    w = parse_word("abab")
    assert in_R(w, 2) and not in_R(w, 1)
    assert in_R(parse_word("aabaa"), 1)
    assert in_B(w, 2) and not in_B(w, 1)
    with pytest.raises(ValueError):
        in_R(w, 0)
    with pytest.raises(ValueError):
        in_R(w, 4)
    with pytest.raises(ValueError):
        in_B(w, 4)


def test_parse_and_format():
    assert parse_word("0110") == (0, 1, 1, 0)
    assert parse_word("0,3,12") == (0, 3, 12)
    assert format_word((0, 1, 2)) == "abc"
    assert format_word((0, 30)) == "0,30"
    with pytest.raises(ValueError):
        parse_word("ab!")


def test_empty_word():
    with pytest.raises(ValueError):
        max_overlap(())


@pytest.mark.parametrize("s, nmax", [(2, 12), (3, 8)])
def test_exhaustive_against_oracles(s, nmax):
    for n in range(1, nmax + 1):
        for w in itertools.product(range(s), repeat=n):
            b = borders(w)
            assert b == naive_borders(w) == oracle.borders(w)
            assert max_overlap(w) == naive_max_overlap(w) == oracle.overlap(w)
            assert first_return(w) == naive_first_return(w) == n - max_overlap(w)


@pytest.mark.parametrize("s, nmax", [(2, 12), (3, 7)])
def test_duality_exhaustive(s, nmax):
    for n in range(2, nmax + 1):
        for w in itertools.product(range(s), repeat=n):
            for k in range(1, n):
                assert in_B(w, n - k) == in_R(w, k)


words = st.integers(2, 4).flatmap(lambda s: st.lists(st.integers(0, s - 1), min_size=1, max_size=60))
repetitive = st.lists(st.sampled_from([(0,), (0, 1), (0, 0, 1), (0, 1, 0)]), min_size=1, max_size=15).map(
    lambda blocks: [x for b in blocks for x in b]
)


@settings(max_examples=400, deadline=None)
@given(st.one_of(words, repetitive))
def test_random_words_match_naive(w):
    assert borders(w) == naive_borders(w)
    assert max_overlap(w) == naive_max_overlap(w)


@settings(max_examples=300, deadline=None)
@given(st.one_of(words, repetitive))
def test_failure_chain(w):
    # the borders of the longest border are exactly the shorter borders
    b = borders(w)
    if b:
        assert borders(w[: b[-1]]) == b[:-1]
    mask = border_mask(w)
    assert [k for k in range(1, len(w)) if mask >> k & 1] == b


@settings(max_examples=300, deadline=None)
@given(st.one_of(words, repetitive))
def test_period_monotone_along_prefixes(w):
    periods = [first_return(w[:t]) for t in range(1, len(w) + 1)]
    assert periods == sorted(periods)
    assert prefix_function(w)[-1] == max_overlap(w)
