from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from cantorcert.interval import Box
from cantorcert.triadic import (BasicSquare, TernaryWord, TriadicRational, cantor_membership, children,
                                rank_cap, rank_numerators, squares_of_rank, word_to_interval)
from cantorcert.errors import RankCapExceeded

words = st.text(alphabet="LR", max_size=12)


def test_word_to_interval_examples():
    assert word_to_interval("").bounds() == (F(0), F(1))
    assert word_to_interval("R").bounds() == (F(2, 3), F(1))
    assert word_to_interval("RL").bounds() == (F(2, 3), F(7, 9))


def test_children_examples():
    for parent, kids in [("", ((0, F(1, 3)), (F(2, 3), 1))),
                         ("R", ((F(2, 3), F(7, 9)), (F(8, 9), 1))),
                         ("L", ((0, F(1, 9)), (F(2, 9), F(1, 3))))]:
        left, right = children(word_to_interval(parent))
        assert left.bounds() == tuple(map(F, kids[0]))
        assert right.bounds() == tuple(map(F, kids[1]))


def test_bad_word_rejected():
    with pytest.raises(ValueError):
        TernaryWord("LXR")


@given(words)
def test_length_is_exact_power(w):
    iv = word_to_interval(w)
    assert iv.length == F(1, 3**len(w))


@given(words)
def test_children_nest_with_middle_gap(w):
    iv = word_to_interval(w)
    a, b = children(iv)
    lo, hi = iv.bounds()
    assert lo == a.bounds()[0] and b.bounds()[1] == hi
    assert b.bounds()[0] - a.bounds()[1] == F(1, 3**(len(w) + 1))


@given(words)
def test_endpoints_in_cantor_set(w):
    lo, hi = word_to_interval(w).bounds()
    assert cantor_membership(lo) and cantor_membership(hi)


def test_triadic_rational_text_round_trip():
    q = TriadicRational(7, 2)
    assert str(q) == "7/3^2"
    assert TriadicRational.parse("7/3^2") == q
    assert q.value == F(7, 9)
    assert TriadicRational(3, 1) == TriadicRational(1, 0)


def test_squares_of_rank_examples(unit):
    assert [s.key for s in squares_of_rank(0, unit)] == [("", "")]
    assert len(list(squares_of_rank(1, unit))) == 4
    # [2/9, 1/3] starts at 0.222..., past 0.2, so only [0, 1/9] meets [0, 0.2]
    assert [s.key for s in squares_of_rank(2, Box.from_bounds(0, 0.2, 0, 0.2))] == [("LL", "LL")]
    small = list(squares_of_rank(2, Box.from_bounds(0, 0.25, 0, 0.25)))
    assert [s.key for s in small] == [("LL", "LL"), ("LL", "LR"), ("LR", "LL"), ("LR", "LR")]


@pytest.mark.parametrize("n", range(9))
def test_square_count(n, unit):
    if n <= 5:
        sq = list(squares_of_rank(n, unit))
        assert len(sq) == 4**n
        assert [s.key for s in sq] == sorted(s.key for s in sq)
    assert len(rank_numerators(n)) == 2**n


def test_rank_numerators_match_words():
    nums = rank_numerators(5, F(1, 5), F(7, 10))
    expect = [word_to_interval(w).left.numerator
              for w in ("".join(t) for t in __import__("itertools").product("LR", repeat=5))
              if word_to_interval(w).bounds()[1] >= F(1, 5) and word_to_interval(w).bounds()[0] <= F(7, 10)]
    assert list(nums) == expect


def test_square_children_and_containment():
    sq = BasicSquare.from_words("R", "L")
    kids = sq.children()
    assert len(kids) == 4 and all(sq.contains_square(k) and k.rank == 2 for k in kids)
    assert not kids[0].contains_square(sq)


@pytest.mark.parametrize("q, expected", [
    (F(8, 9), True), (F(1, 3), True), (F(1, 2), False), (F(1, 4), True), (F(3, 4), True),
    (F(0), True), (F(1), True), (F(2, 9), True), (F(4, 9), False), (F(1, 10), True), (F(5, 9), False),
])
def test_cantor_membership(q, expected):
    assert cantor_membership(q) is expected


def test_cantor_membership_range():
    with pytest.raises(ValueError):
        cantor_membership(F(4, 3))


def test_rank_cap(monkeypatch):
    assert rank_cap() == 30
    monkeypatch.setenv("CANTOR_RANK_CAP", "5")
    assert rank_cap() == 5
    with pytest.raises(RankCapExceeded):
        list(squares_of_rank(6))
