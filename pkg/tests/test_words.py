import math

import pytest
from hypothesis import given, strategies as st

from thetalink.errors import ConfigError
from thetalink.words import (Word, canonical, classify, count_catalan, count_symmetric,
                             enumerate_pair_matched, generating_vertices, has_double, is_catalan,
                             is_symmetric, parse_word, reduce_double, render)


def w(text):
    return parse_word(text)


def double_factorial(m):
    return math.prod(range(m, 0, -2))


def test_enumerate_small():
    assert [str(x) for x in enumerate_pair_matched(1)] == ["aa"]
    assert [str(x) for x in enumerate_pair_matched(2)] == ["aabb", "abab", "abba"]
    assert len(enumerate_pair_matched(3)) == 15


@pytest.mark.parametrize("k", range(1, 7))
def test_enumerate_counts_and_canonical(k):
    words = enumerate_pair_matched(k)
    assert len(words) == double_factorial(2 * k - 1)
    assert len(set(words)) == len(words)
    assert list(words) == sorted(words)
    assert all(canonical(x.letters) == x.letters for x in words)


def test_enumerate_range():
    for k in (0, 7):
        with pytest.raises(ConfigError):
            enumerate_pair_matched(k)


def test_symmetric_examples():
    assert not is_symmetric(w("abab"))
    assert is_symmetric(w("abba"))
    assert is_symmetric(w("abcabc"))
    assert is_symmetric(w("aabbcddc"))


def test_catalan_examples():
    assert is_catalan(w("aabb"))
    assert not is_catalan(w("abab"))
    assert is_catalan(w("abbcca"))
    assert reduce_double(w("aabb")) == (w("aa"), 1)
    assert reduce_double(w("abbcca")) == (w("abba"), 2)
    assert reduce_double(w("aa")) == (None, 1)


def test_reduce_without_double():
    with pytest.raises(ConfigError):
        reduce_double(w("abab"))


def test_generating_vertices():
    # not pair-matched, but the definition still applies
    assert generating_vertices("abbcab") == (0, 1, 2, 4)
    assert generating_vertices(w("aa")) == (0, 1)
    assert generating_vertices(w("abba")) == (0, 1, 2)


@pytest.mark.parametrize("k,cat,sym", [(1, 1, 1), (2, 2, 2), (3, 5, 6), (4, 14, 24), (5, 42, 120)])
def test_class_counts(k, cat, sym):
    assert count_catalan(k) == cat
    assert count_symmetric(k) == sym


@pytest.mark.parametrize("k", range(1, 6))
def test_catalan_implies_symmetric_and_reduction_stays_catalan(k):
    for x in enumerate_pair_matched(k):
        c = classify(x)
        assert len(c.generating_vertices) == k + 1
        if c.catalan:
            assert c.symmetric
            rest, _ = reduce_double(x)
            assert rest is None or is_catalan(rest)


def test_parse_errors_and_hint():
    with pytest.raises(ConfigError, match="did you mean 'abba'"):
        parse_word("baab")
    for bad in ("abc", "aab", "", "ab-a", "Abba"):
        with pytest.raises(ConfigError):
            parse_word(bad)
    assert parse_word("0-1-1-0") == w("abba")


def test_word_indexing():
    x = w("abcabc")
    assert x.k == 3 and x[1] == 0 and x[6] == 2
    assert x.matches() == [(1, 4), (2, 5), (3, 6)]
    with pytest.raises(IndexError):
        x[0]
    with pytest.raises(ConfigError):
        Word((1, 0, 0, 1))


def test_render_large_ids():
    assert render(tuple(range(30))) == "-".join(str(i) for i in range(30))


@given(st.lists(st.integers(0, 5), min_size=1, max_size=12))
def test_canonical_idempotent(letters):
    once = canonical(letters)
    assert canonical(once) == once


@given(st.permutations(list(range(4)) * 2))
def test_random_words_classified_consistently(letters):
    x = Word(canonical(letters))
    # stack test and repeated leftmost deletion agree
    cur, reducible = x, True
    while cur is not None:
        if not has_double(cur):
            reducible = False
            break
        cur, _ = reduce_double(cur)
    assert reducible == is_catalan(x)
