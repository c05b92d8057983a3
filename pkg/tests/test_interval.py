import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from cantorcert.errors import DomainError, NumericOverflow
from cantorcert.interval import (Interval, IntervalUnion, arith, div_down, div_up, mul_down, mul_up,
                                 subset_with_slack, union_insert)

TRIALS = 1000


def rand_box(rng, lo=-10.0, hi=10.0, positive=False):
    a, b = sorted(rng.uniform(lo, hi) for _ in range(2))
    if positive:
        a, b = abs(a) + 1e-3, abs(b) + 1e-3
        a, b = min(a, b), max(a, b)
    return Interval(a, b), rng.uniform(a, b)


EXACT_BINARY = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


@pytest.mark.parametrize("op", sorted(EXACT_BINARY))
def test_binary_soundness(op):
    rng = random.Random(op)
    bad = 0
    for _ in range(TRIALS):
        a, x = rand_box(rng)
        b, y = rand_box(rng, positive=(op == "div"))
        if op == "div" and rng.random() < 0.5:
            b, y = -b, -y
        r = arith(op, a, b)
        # exact rational reference; the float points themselves are exact rationals
        bad += not r.contains(EXACT_BINARY[op](F(x), F(y)))
        bad += not r.contains(EXACT_BINARY[op](F(a.lo), F(b.hi)))
    assert bad == 0


UNARY = {
    "neg": (lambda v: -v, False),
    "sin": (math.sin, False),
    "cos": (math.cos, False),
    "exp": (math.exp, False),
    "ln": (math.log, True),
    "sqrt": (math.sqrt, True),
}


@pytest.mark.parametrize("op", sorted(UNARY))
def test_unary_soundness(op):
    fn, positive = UNARY[op]
    rng = random.Random(op)
    bad = 0
    for _ in range(TRIALS):
        a, x = rand_box(rng, positive=positive)
        r = arith(op, a)
        bad += not (r.contains(fn(x)) and r.contains(fn(a.lo)) and r.contains(fn(a.hi)))
    assert bad == 0


@pytest.mark.parametrize("exponent", [2, 3, -1, -2, 5, F(1, 2), F(3, 2), F(-1, 3)])
def test_pow_soundness(exponent):
    rng = random.Random(str(exponent))
    positive = exponent.denominator != 1 if isinstance(exponent, F) else exponent < 0
    bad = 0
    for _ in range(TRIALS):
        a, x = rand_box(rng, -3, 3, positive=positive)
        r = arith("pow", a, exponent=exponent)
        if F(exponent).denominator == 1:
            ref = F(x) ** int(exponent)
        else:
            ref = x ** float(exponent)
        bad += not r.contains(ref)
    assert bad == 0


def test_trig_extrema():
    s = arith("sin", Interval(1.0, 2.0))
    assert s.hi >= 1.0 and s.lo <= math.sin(1.0)
    c = arith("cos", Interval(3.0, 3.5))
    assert c.lo <= -1.0
    assert arith("sin", Interval(0.0, 100.0)) == Interval(-1.0, 1.0)


def test_examples():
    r = arith("add", Interval(1, 2), Interval(3, 4))
    assert r.lo <= 4 and r.hi >= 6 and r.hi - r.lo <= 2 + 1e-14
    m = arith("mul", Interval.from_fraction(F(2, 9), F(3, 9)), Interval.from_fraction(F(6, 9), F(7, 9)))
    assert m.contains(F(12, 81)) and m.contains(F(21, 81))
    assert m.lo >= math.nextafter(math.nextafter(12 / 81, 0), 0)
    assert m.hi <= math.nextafter(math.nextafter(21 / 81, 1), 1)
    with pytest.raises(DomainError):
        arith("div", Interval(1, 1), Interval(0, 1))
    with pytest.raises(DomainError):
        arith("ln", Interval(0, 1))
    with pytest.raises(DomainError):
        arith("pow", Interval(-1, 1), exponent=F(1, 2))


def test_overflow():
    with pytest.raises(NumericOverflow):
        arith("exp", Interval(0, 1000))
    with pytest.raises(OverflowError):
        arith("mul", Interval(1e200, 1e200), Interval(1e200, 1e200))


finite = st.floats(-1e6, 1e6, allow_nan=False)
nonzero = finite.filter(lambda v: abs(v) > 1e-300)


@given(finite, finite)
def test_directed_products(a, b):
    assert F(float(mul_down(a, b))) <= F(a) * F(b) <= F(float(mul_up(a, b)))


@given(finite, nonzero)
def test_directed_quotients(a, b):
    assert F(float(div_down(a, b))) <= F(a) / F(b) <= F(float(div_up(a, b)))


@st.composite
def nested_pairs(draw):
    a, b = sorted([draw(st.floats(-5, 5)), draw(st.floats(-5, 5))])
    c, d = sorted([draw(st.floats(0, 2)), draw(st.floats(0, 2))])
    inner = Interval(a, b)
    outer = Interval(a - c, b + d)
    return inner, outer


@pytest.mark.parametrize("op", ["add", "sub", "mul", "sin", "cos", "exp", "sq"])
@given(pa=nested_pairs(), pb=nested_pairs())
def test_monotone_inclusion(op, pa, pb):
    (a, a2), (b, b2) = pa, pb
    if op in ("add", "sub", "mul"):
        assert arith(op, a2, b2).contains(arith(op, a, b))
    elif op == "sq":
        assert arith("pow", a2, exponent=2).contains(arith("pow", a, exponent=2))
    else:
        assert arith(op, a2).contains(arith(op, a))


def test_union_insert_examples():
    u = union_insert(union_insert(IntervalUnion(), Interval.from_fraction(0, F(1, 3))),
                     Interval.from_fraction(F(4, 9), 1))
    assert len(u) == 2 and abs(u.measure - 8 / 9) <= 1e-15
    v = union_insert(union_insert(IntervalUnion(), Interval(0, 2 / 3)), Interval(2 / 3, 4 / 3))
    assert v.parts == (Interval(0.0, 4 / 3),)
    assert union_insert(u, Interval(0.1, 0.2)) == u


intervals = st.tuples(st.floats(-100, 100), st.floats(0, 10)).map(lambda t: Interval(t[0], t[0] + t[1]))


@given(st.lists(intervals, max_size=30), st.randoms(use_true_random=False))
def test_union_order_independent(items, rnd):
    a = IntervalUnion()
    for v in items:
        a = a.insert(v)
    shuffled = list(items)
    rnd.shuffle(shuffled)
    b = IntervalUnion()
    for v in shuffled:
        b = b.insert(v)
    assert a == b == IntervalUnion.from_intervals(items)
    assert a.measure <= math.fsum(v.width for v in items) * (1 + 1e-12)
    for p, q in zip(a.parts, a.parts[1:]):
        assert p.hi < q.lo


def test_subset_with_slack_examples():
    u = IntervalUnion.from_intervals([Interval.from_fraction(0, F(1, 3)), Interval.from_fraction(F(4, 9), 1)])
    assert subset_with_slack(Interval(0.2, 0.23), u, 0)
    assert not subset_with_slack(Interval(0.3, 0.5), u, 0)
    # shrinking by 0.01 leaves [0.34, 0.33] in exact arithmetic: empty, hence trivially covered
    assert subset_with_slack(Interval(0.33, 0.34), u, 0.01)
    assert not subset_with_slack(Interval(0.33, 0.34), u, 0.001)
    assert subset_with_slack(Interval(0.3, 0.34), u, 0.01)
    assert not subset_with_slack(Interval(0.3, 0.5), u, 0.05)
