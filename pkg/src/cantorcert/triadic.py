"""Exact triadic combinatorics of the middle-third Cantor set.

A basic interval of rank n is the image of [0, 1] under an n-fold
composition of ``x/3`` (digit ``L``) and ``(x+2)/3`` (digit ``R``).  Its
left endpoint is ``numerator / 3**n`` with a numerator whose base-3 digits
are all 0 or 2.  Endpoints are kept as Python integers so nothing overflows
no matter how deep the rank.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterator

import numpy as np

from .errors import RankCapExceeded
from .interval import Box

DEFAULT_RANK_CAP = 30

# numerators and 3**n stay exact in float64 / int64 up to this rank
MAX_VECTOR_RANK = 33

_DIGIT_VALUE = {"L": 0, "R": 2}


def rank_cap() -> int:
    value = os.environ.get("CANTOR_RANK_CAP")
    return int(value) if value else DEFAULT_RANK_CAP


def check_rank(n: int, cap: int | None = None) -> None:
    cap = rank_cap() if cap is None else cap
    if n < 0:
        raise ValueError(f"rank must be nonnegative, got {n}")
    if n > cap:
        raise RankCapExceeded(f"rank {n} exceeds the rank cap {cap}")


@total_ordering
@dataclass(frozen=True)
class TernaryWord:
    digits: str = ""

    def __post_init__(self):
        if any(c not in "LR" for c in self.digits):
            raise ValueError(f"ternary words use only L and R, got {self.digits!r}")

    @property
    def rank(self) -> int:
        return len(self.digits)

    def __lt__(self, other: TernaryWord) -> bool:
        return self.digits < other.digits

    def __add__(self, digit: str) -> TernaryWord:
        return TernaryWord(self.digits + digit)

    def __str__(self) -> str:
        return self.digits

    def numerator(self) -> int:
        num = 0
        for c in self.digits:
            num = 3 * num + _DIGIT_VALUE[c]
        return num


@dataclass(frozen=True, eq=False)
class TriadicRational:
    """The value ``numerator / 3**rank``; equality is by value."""

    numerator: int
    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 3**self.rank)

    def __eq__(self, other):
        if isinstance(other, TriadicRational):
            return self.numerator * 3**other.rank == other.numerator * 3**self.rank
        if isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __lt__(self, other: TriadicRational) -> bool:
        return self.value < other.value

    def __le__(self, other: TriadicRational) -> bool:
        return self.value <= other.value

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return f"{self.numerator}/3^{self.rank}"

    @classmethod
    def parse(cls, text: str) -> TriadicRational:
        m = re.fullmatch(r"\s*(-?\d+)\s*/\s*3\^(\d+)\s*", text)
        if not m:
            raise ValueError(f"not a triadic rational: {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))


@dataclass(frozen=True)
class BasicInterval:
    word: TernaryWord

    @property
    def rank(self) -> int:
        return self.word.rank

    @property
    def left(self) -> TriadicRational:
        return TriadicRational(self.word.numerator(), self.rank)

    @property
    def right(self) -> TriadicRational:
        return TriadicRational(self.word.numerator() + 1, self.rank)

    @property
    def length(self) -> Fraction:
        return Fraction(1, 3**self.rank)

    def bounds(self) -> tuple[Fraction, Fraction]:
        return self.left.value, self.right.value

    def contains(self, q: Fraction) -> bool:
        lo, hi = self.bounds()
        return lo <= q <= hi

    def __str__(self) -> str:
        return f"[{self.left}, {self.right}]"


@dataclass(frozen=True)
class BasicSquare:
    ix: BasicInterval
    iy: BasicInterval

    def __post_init__(self):
        if self.ix.rank != self.iy.rank:
            raise ValueError("both sides of a basic square must have the same rank")

    @classmethod
    def from_words(cls, x_word: str, y_word: str) -> BasicSquare:
        return cls(word_to_interval(TernaryWord(x_word)), word_to_interval(TernaryWord(y_word)))

    @property
    def rank(self) -> int:
        return self.ix.rank

    @property
    def key(self) -> tuple[str, str]:
        return self.ix.word.digits, self.iy.word.digits

    def box(self) -> Box:
        """Outward-rounded float box enclosing the closed square."""
        return Box.from_fractions(*self.ix.bounds(), *self.iy.bounds())

    def children(self) -> list[BasicSquare]:
        xs, ys = children(self.ix), children(self.iy)
        return [BasicSquare(a, b) for a in xs for b in ys]

    def contains_square(self, other: BasicSquare) -> bool:
        return other.ix.word.digits.startswith(self.ix.word.digits) and other.iy.word.digits.startswith(
            self.iy.word.digits
        )

    def __str__(self) -> str:
        return f"{self.ix} x {self.iy}"


def word_to_interval(word: TernaryWord | str) -> BasicInterval:
    if isinstance(word, str):
        word = TernaryWord(word)
    return BasicInterval(word)


def children(iv: BasicInterval) -> tuple[BasicInterval, BasicInterval]:
    return BasicInterval(iv.word + "L"), BasicInterval(iv.word + "R")


def _fraction_bounds(region_lo: float, region_hi: float) -> tuple[Fraction, Fraction]:
    return Fraction(region_lo), Fraction(region_hi)


def interval_words(n: int, lo: Fraction, hi: Fraction) -> list[TernaryWord]:
    """Rank-n words whose closed interval meets [lo, hi], in lexicographic order."""
    check_rank(n)
    out = []

    def walk(prefix: str, num: int, k: int):
        scale = 3**k
        # [num/scale, (num+1)/scale] meets [lo, hi]
        if num > hi * scale or num + 1 < lo * scale:
            return
        if k == n:
            out.append(TernaryWord(prefix))
            return
        walk(prefix + "L", 3 * num, k + 1)
        walk(prefix + "R", 3 * num + 2, k + 1)

    walk("", 0, 0)
    return out


def squares_of_rank(n: int, region: Box | None = None) -> Iterator[BasicSquare]:
    """Rank-n basic squares meeting ``region``, ordered by (x-word, y-word)."""
    region = region or Box.unit()
    xs = interval_words(n, *_fraction_bounds(region.x.lo, region.x.hi))
    ys = interval_words(n, *_fraction_bounds(region.y.lo, region.y.hi))
    for wx in xs:
        ix = BasicInterval(wx)
        for wy in ys:
            yield BasicSquare(ix, BasicInterval(wy))


def rank_numerators(n: int, lo: Fraction = Fraction(0), hi: Fraction = Fraction(1), start: int = 0,
                    start_rank: int = 0) -> np.ndarray:
    """Left-endpoint numerators (over 3**n) of rank-n intervals meeting [lo, hi].

    Enumeration starts from the interval ``start / 3**start_rank`` so a
    partition of the tree can be expanded independently.  The result is in
    increasing (equivalently lexicographic) order.
    """
    check_rank(n)
    if n > MAX_VECTOR_RANK:
        raise RankCapExceeded(f"vectorised enumeration supports rank <= {MAX_VECTOR_RANK}")
    nums = np.array([start], dtype=np.int64)
    for k in range(start_rank, n + 1):
        scale = 3**k
        nums = nums[_meets(nums, scale, lo, hi)]
        if k == n or len(nums) == 0:
            break
        nums = np.stack([3 * nums, 3 * nums + 2], axis=1).reshape(-1)
    return nums


def _meets(nums: np.ndarray, scale: int, lo: Fraction, hi: Fraction) -> np.ndarray:
    # exact integer comparisons: num <= hi*scale  <=>  num <= floor(hi*scale)
    upper = min(max((hi * scale).__floor__(), -1), scale + 1)
    lower = min(max((lo * scale).__ceil__() - 1, -1), scale + 1)
    return (nums <= upper) & (nums >= lower)


def cantor_membership(q: Fraction | int | str) -> bool:
    """Exact test of ``q`` in C via the eventually periodic base-3 expansion."""
    q = Fraction(q)
    if q < 0 or q > 1:
        raise ValueError(f"{q} is outside [0, 1]")
    p, d = q.numerator, q.denominator
    if p == d:
        return True
    r = p
    seen = set()
    while True:
        if r == 0 or r in seen:
            return True
        seen.add(r)
        digit, r = divmod(3 * r, d)
        if digit == 1:
            # a terminating ...1 has the dual expansion ...0222...
            return r == 0
