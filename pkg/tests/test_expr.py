import math
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cantorcert.errors import DomainError, NotDifferentiable, ParseError
from cantorcert.expr import (Add, Func, Mul, Num, Pow, Var, differentiate, eval_exact, eval_interval,
                             eval_point, eval_points, gradient, parse, to_text)
from cantorcert.interval import Box, Interval

X, Y = Var("x"), Var("y")

COROLLARY = ["x^2*y", "x^2+y^2", "x^2-y^2", "x+y^2", "x-y^2", "sin(x)*cos(y)"]

CORPUS = [
    "x*y", "x + y", "x - y", "-x", "--x", "x^2*y", "x^-2", "-x^2", "(-x)^2", "x^2^3",
    "x/y/2", "x/(y/2)", "x - (y - 1)", "2*x*y + 3", "sin(x)*cos(y)", "exp(ln(x + 1))",
    "sqrt(x^2 + y^2)", "pi*x + e", "x^(1/2) * y ** 3", "1.5e1*x - .25*y",
]


def test_parse_examples():
    assert parse("x*y") == Mul(X, Y)
    assert parse("sin(x)*cos(y)") == Mul(Func("sin", X), Func("cos", Y))
    with pytest.raises(ParseError) as exc:
        parse("x + ")
    assert exc.value.offset == 4


@pytest.mark.parametrize("text, offset", [("x * * y", 4), ("sin x", 4), ("(x + y", 6), ("x y", 2),
                                          ("foo(x)", 0), ("", 0), ("x + é", 4)])
def test_parse_errors(text, offset):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert exc.value.offset == offset


def test_power_is_right_associative():
    assert parse("x^2^3") == Pow(X, Pow(Num(F(2)), Num(F(3))))
    assert parse("x**2") == parse("x^2")
    assert parse("-x^2") == parse("-(x^2)")


@pytest.mark.parametrize("text", CORPUS)
def test_round_trip(text):
    e = parse(text)
    assert parse(to_text(e)) == e


def test_derivative_examples():
    g = gradient("x*y")
    assert (g.fx, g.fy) == (Y, X)
    g = gradient("x + y^2")
    assert g.fx == Num(F(1))
    assert g.fy == Mul(Num(F(2)), Y)
    g = gradient("sin(x)*cos(y)")
    assert to_text(g.fx) == "cos(x)*cos(y)"
    assert parse(to_text(g.fy)) == g.fy
    for x, y in [(0.3, 0.7), (2 / 3, 2 / 3)]:
        assert math.isclose(eval_point(g.fy, x, y), -math.sin(x) * math.sin(y), rel_tol=1e-15)


def test_not_differentiable():
    with pytest.raises(NotDifferentiable):
        gradient("x^y")
    g = gradient("2^x")
    assert math.isclose(eval_point(g.fx, 1.0, 0.0), 2 * math.log(2), rel_tol=1e-14)


@pytest.mark.parametrize("text", COROLLARY)
def test_derivatives_match_finite_differences(text):
    e = parse(text)
    g = differentiate(e)
    rng = random.Random(text)
    h = 1e-6
    worst = 0.0
    for _ in range(100):
        x, y = rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)
        # fourth-order central differences keep truncation error well below 1e-6
        dx = (-eval_point(e, x + 2 * h, y) + 8 * eval_point(e, x + h, y)
              - 8 * eval_point(e, x - h, y) + eval_point(e, x - 2 * h, y)) / (12 * h)
        dy = (-eval_point(e, x, y + 2 * h) + 8 * eval_point(e, x, y + h)
              - 8 * eval_point(e, x, y - h) + eval_point(e, x, y - 2 * h)) / (12 * h)
        for num, sym in ((dx, eval_point(g.fx, x, y)), (dy, eval_point(g.fy, x, y))):
            worst = max(worst, abs(num - sym) / abs(sym))
    assert worst <= 1e-6


def test_eval_point_examples():
    assert math.isclose(eval_point(parse("x*y"), 1 / 3, 2 / 3), 2 / 9, rel_tol=1e-15)
    g = gradient("sin(x)*cos(y)")
    assert abs(abs(eval_point(g.fx, 2 / 3, 2 / 3)) - 0.6176) < 5e-4
    assert abs(abs(eval_point(g.fy, 2 / 3, 2 / 3)) - 0.3823) < 5e-4
    with pytest.raises(DomainError):
        eval_point(parse("ln(x)"), 0.0, 0.5)
    with pytest.raises(DomainError):
        eval_points(parse("1/x"), np.array([0.0, 1.0]), np.array([0.0, 0.0]))


def test_eval_interval_examples():
    r = eval_interval(parse("x+y"), Box.unit())
    assert r.lo <= 0 and r.hi >= 2
    box = Box.from_fractions(F(8, 27), F(9, 27), F(18, 27), F(19, 27))
    r = eval_interval(gradient("x*y").fx, box)
    assert r.contains(F(18, 27)) and r.contains(F(19, 27))
    with pytest.raises(DomainError):
        eval_interval(parse("1/x"), Box(Interval(0, 1), Interval(5, 6)))


def test_eval_exact():
    assert eval_exact(parse("x*y + x^2 - 1/y"), F(1, 3), F(2, 3)) == F(2, 9) + F(1, 9) - F(3, 2)
    assert eval_exact(parse("sin(x)"), F(0), F(0)) is None


ALL = COROLLARY + ["x/(1+y)", "exp(x-y)", "sqrt(x+y+1)", "ln(2+x*y)", "x^(3/2)+y", "(x-y)^3", "pi*x - e*y"]


@pytest.mark.parametrize("text", ALL)
@given(x=st.floats(0.01, 1), y=st.floats(0, 1))
def test_point_in_degenerate_interval(text, x, y):
    e = parse(text)
    r = eval_interval(e, Box.point(x, y))
    v = eval_point(e, x, y)
    assert r.contains(v)
    assert r.width <= 1e-12 * max(1.0, abs(v))


@pytest.mark.parametrize("text", ALL)
def test_interval_encloses_samples(text):
    e = parse(text)
    rng = np.random.default_rng(7)
    for _ in range(50):
        x0, y0 = rng.uniform(0.01, 0.9, 2)
        w = rng.uniform(0, 0.1)
        r = eval_interval(e, Box.from_bounds(x0, x0 + w, y0, y0 + w))
        xs = rng.uniform(x0, x0 + w, 200)
        ys = rng.uniform(y0, y0 + w, 200)
        vals = eval_points(e, xs, ys)
        assert np.all((vals >= r.lo) & (vals <= r.hi))


def test_simplification_is_light():
    g = gradient("x + 0*y")
    assert g.fy == Num(F(0))
    assert gradient("3*x").fx == Num(F(3))
    assert isinstance(parse("x + y"), Add)
