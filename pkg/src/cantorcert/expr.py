"""Expressions in x and y: parsing, printing, symbolic partials, evaluation.

Grammar (whitespace insensitive, ``**`` accepted as a synonym of ``^``)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?
    atom  := number | 'x' | 'y' | 'pi' | 'e' | name '(' expr ')' | '(' expr ')'

Function names are sin, cos, exp, ln and sqrt.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from . import interval as iv
from .errors import DomainError, NotDifferentiable, NumericOverflow, ParseError
from .interval import Box, Interval

FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt")


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Const:
    name: str  # "pi" or "e"


@dataclass(frozen=True)
class Var:
    name: str  # "x" or "y"


@dataclass(frozen=True)
class Neg:
    arg: Expr


@dataclass(frozen=True)
class Add:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow:
    base: Expr
    exponent: Expr


@dataclass(frozen=True)
class Func:
    name: str
    arg: Expr


Expr = Union[Num, Const, Var, Neg, Add, Sub, Mul, Div, Pow, Func]

ZERO = Num(Fraction(0))
ONE = Num(Fraction(1))
X = Var("x")
Y = Var("y")


@dataclass(frozen=True)
class GradTriple:
    f: Expr
    fx: Expr
    fy: Expr


# ------------------------------------------------------------------ parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>\*\*|[-+*/^()]))"
)


@dataclass
class _Token:
    kind: str
    text: str
    offset: int


def _byte_offset(text: str, i: int) -> int:
    return len(text[:i].encode("utf-8"))


def tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        kind = m.lastgroup
        start = m.start(kind)
        tok = m.group(kind)
        tokens.append(_Token(kind, "^" if tok == "**" else tok, _byte_offset(text, start)))
        pos = m.end()
    tokens.append(_Token("eof", "", _byte_offset(text, len(text))))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def fail(self, expected: str):
        found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
        raise ParseError(f"expected {expected}, found {found}", self.tok.offset)

    def accept(self, *ops: str) -> str | None:
        if self.tok.kind == "op" and self.tok.text in ops:
            self.i += 1
            return self.tokens[self.i - 1].text
        return None

    def expect(self, op: str):
        if not self.accept(op):
            self.fail(repr(op))

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "eof":
            self.fail("an operator or end of input")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while op := self.accept("+", "-"):
            e = (Add if op == "+" else Sub)(e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while op := self.accept("*", "/"):
            e = (Mul if op == "*" else Div)(e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept("^"):
            return Pow(base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(Fraction(tok.text))
        if tok.kind == "name":
            self.i += 1
            if tok.text in ("x", "y"):
                return Var(tok.text)
            if tok.text in ("pi", "e"):
                return Const(tok.text)
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(tok.text, arg)
            raise ParseError(f"unknown name {tok.text!r}", tok.offset)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.fail("a number, variable, function call or '('")


def parse(text: str) -> Expr:
    return _Parser(text).parse()


# ------------------------------------------------------------------ printing

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def _prec(e: Expr) -> int:
    if isinstance(e, Num) and e.value < 0:
        return 3
    return _PREC.get(type(e), 5)


def _num_text(q: Fraction) -> str:
    if q < 0:
        return "-" + _num_text(-q)
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"({q.numerator}/{q.denominator})"
    k = max(twos, fives)
    digits = str(q.numerator * 10**k // q.denominator).rjust(k + 1, "0")
    return f"{digits[:-k]}.{digits[-k:]}"


def to_text(e: Expr) -> str:
    def wrap(sub: Expr, min_prec: int) -> str:
        s = to_text(sub)
        return f"({s})" if _prec(sub) < min_prec else s

    match e:
        case Num(value):
            return _num_text(value)
        case Const(name) | Var(name):
            return name
        case Neg(a):
            return "-" + wrap(a, 3)
        case Add(a, b):
            return f"{wrap(a, 1)} + {wrap(b, 2)}"
        case Sub(a, b):
            return f"{wrap(a, 1)} - {wrap(b, 2)}"
        case Mul(a, b):
            return f"{wrap(a, 2)}*{wrap(b, 3)}"
        case Div(a, b):
            return f"{wrap(a, 2)}/{wrap(b, 3)}"
        case Pow(a, b):
            return f"{wrap(a, 5)}^{wrap(b, 3)}"
        case Func(name, a):
            return f"{name}({to_text(a)})"
    raise TypeError(f"not an expression: {e!r}")


# ------------------------------------------------------------------ structure


def variables(e: Expr) -> frozenset[str]:
    match e:
        case Var(name):
            return frozenset({name})
        case Num() | Const():
            return frozenset()
        case Neg(a) | Func(_, a):
            return variables(a)
        case Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b):
            return variables(a) | variables(b)
    raise TypeError(f"not an expression: {e!r}")


def rational_value(e: Expr) -> Fraction | None:
    """Exact value of a variable-free expression built from numbers, else None."""
    match e:
        case Num(value):
            return value
        case Neg(a):
            v = rational_value(a)
            return None if v is None else -v
        case Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b):
            va, vb = rational_value(a), rational_value(b)
            if va is None or vb is None:
                return None
            if isinstance(e, Add):
                return va + vb
            if isinstance(e, Sub):
                return va - vb
            if isinstance(e, Mul):
                return va * vb
            return None if vb == 0 else va / vb
        case Pow(a, b):
            va, vb = rational_value(a), rational_value(b)
            if va is None or vb is None or vb.denominator != 1 or abs(vb) > 64:
                return None
            if va == 0 and vb < 0:
                return None
            return va ** int(vb)
    return None


def eval_exact(e: Expr, x: Fraction, y: Fraction) -> Fraction | None:
    """Exact rational value at a rational point, or None if not rational-only."""
    def sub_vars(node: Expr) -> Expr:
        match node:
            case Var(name):
                return Num(Fraction(x if name == "x" else y))
            case Num() | Const():
                return node
            case Neg(a):
                return Neg(sub_vars(a))
            case Func(name, a):
                return Func(name, sub_vars(a))
            case Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b):
                return type(node)(sub_vars(a), sub_vars(b))
        raise TypeError(f"not an expression: {node!r}")

    return rational_value(sub_vars(e))


# ------------------------------------------------------------------ differentiation
# Smart constructors doing the light simplification: 0*u -> 0, u+0 -> u,
# u*1 -> u, constant folding of plain numbers.


def _is(e: Expr, v: int) -> bool:
    return isinstance(e, Num) and e.value == v


def add(a: Expr, b: Expr) -> Expr:
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    if isinstance(b, Neg):
        return sub(a, b.arg)
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is(b, 0):
        return a
    if _is(a, 0):
        return neg(b)
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value - b.value)
    return Sub(a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def mul(a: Expr, b: Expr) -> Expr:
    if _is(a, 0) or _is(b, 0):
        return ZERO
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    if isinstance(a, Neg):
        return neg(mul(a.arg, b))
    if isinstance(b, Neg):
        return neg(mul(a, b.arg))
    if isinstance(b, Num) and not isinstance(a, Num):
        return Mul(b, a)
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is(a, 0):
        return ZERO
    if _is(b, 1):
        return a
    if isinstance(a, Num) and isinstance(b, Num) and b.value != 0:
        return Num(a.value / b.value)
    return Div(a, b)


def power(a: Expr, b: Expr) -> Expr:
    if _is(b, 1):
        return a
    if _is(b, 0):
        return ONE
    if isinstance(a, Num) and isinstance(b, Num) and b.value.denominator == 1 and not (a.value == 0 and b.value < 0):
        return Num(a.value ** int(b.value))
    return Pow(a, b)


def derivative(e: Expr, var: str) -> Expr:
    if var not in variables(e):
        return ZERO
    match e:
        case Var(name):
            return ONE if name == var else ZERO
        case Neg(a):
            return neg(derivative(a, var))
        case Add(a, b):
            return add(derivative(a, var), derivative(b, var))
        case Sub(a, b):
            return sub(derivative(a, var), derivative(b, var))
        case Mul(a, b):
            return add(mul(derivative(a, var), b), mul(a, derivative(b, var)))
        case Div(a, b):
            da, db = derivative(a, var), derivative(b, var)
            if _is(db, 0):
                return div(da, b)
            return div(sub(mul(da, b), mul(a, db)), power(b, Num(Fraction(2))))
        case Pow(a, b):
            return _pow_derivative(a, b, var)
        case Func("sin", a):
            return mul(Func("cos", a), derivative(a, var))
        case Func("cos", a):
            return neg(mul(Func("sin", a), derivative(a, var)))
        case Func("exp", a):
            return mul(e, derivative(a, var))
        case Func("ln", a):
            return div(derivative(a, var), a)
        case Func("sqrt", a):
            return div(derivative(a, var), mul(Num(Fraction(2)), e))
    raise TypeError(f"cannot differentiate {e!r}")


def _pow_derivative(a: Expr, b: Expr, var: str) -> Expr:
    if not variables(b):
        q = rational_value(b)
        lowered = Num(q - 1) if q is not None else sub(b, ONE)
        coeff = Num(q) if q is not None else b
        return mul(mul(coeff, power(a, lowered)), derivative(a, var))
    base = rational_value(a)
    if (base is not None and base > 0) or isinstance(a, Const):
        # c^u with c > 0 is exp(u ln c)
        return mul(mul(Pow(a, b), Func("ln", a)), derivative(b, var))
    raise NotDifferentiable(
        f"{to_text(Pow(a, b))}: power with a variable exponent needs a positive constant base"
    )


def differentiate(e: Expr) -> GradTriple:
    return GradTriple(e, derivative(e, "x"), derivative(e, "y"))


def gradient(text: str) -> GradTriple:
    return differentiate(parse(text))


# ------------------------------------------------------------------ evaluation

_POINT_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp}


def eval_point(e: Expr, x: float, y: float) -> float:
    """Float evaluation; a heuristic aid only, never used to certify."""
    out = eval_points(e, np.array([float(x)]), np.array([float(y)]))
    return float(out[0])


def eval_points(e: Expr, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorised float evaluation at the points (xs[i], ys[i])."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        out = _points(e, xs, ys)
    out = np.broadcast_to(out, np.broadcast(xs, ys).shape)
    if not np.all(np.isfinite(out)):
        raise NumericOverflow("point evaluation produced a non-finite value")
    return np.array(out, dtype=float)


def _points(e: Expr, xs, ys):
    match e:
        case Num(value):
            return float(value)
        case Const(name):
            return math.pi if name == "pi" else math.e
        case Var(name):
            return xs if name == "x" else ys
        case Neg(a):
            return -_points(a, xs, ys)
        case Add(a, b):
            return _points(a, xs, ys) + _points(b, xs, ys)
        case Sub(a, b):
            return _points(a, xs, ys) - _points(b, xs, ys)
        case Mul(a, b):
            return _points(a, xs, ys) * _points(b, xs, ys)
        case Div(a, b):
            den = _points(b, xs, ys)
            if np.any(den == 0):
                raise DomainError("division by zero")
            return _points(a, xs, ys) / den
        case Pow(a, b):
            base = _points(a, xs, ys)
            q = rational_value(b)
            if q is not None and q.denominator == 1:
                n = int(q)
                if n < 0 and np.any(base == 0):
                    raise DomainError("negative power of zero")
                return np.power(np.asarray(base, dtype=float), float(n))
            if np.any(np.asarray(base) <= 0):
                raise DomainError("non-integer power of a non-positive base")
            return np.exp(_points(b, xs, ys) * np.log(base))
        case Func("ln", a):
            v = _points(a, xs, ys)
            if np.any(np.asarray(v) <= 0):
                raise DomainError("ln of a non-positive value")
            return np.log(v)
        case Func("sqrt", a):
            v = _points(a, xs, ys)
            if np.any(np.asarray(v) < 0):
                raise DomainError("sqrt of a negative value")
            return np.sqrt(v)
        case Func(name, a):
            return _POINT_FUNCS[name](_points(a, xs, ys))
    raise TypeError(f"not an expression: {e!r}")


def eval_interval(e: Expr, b: Box) -> Interval:
    """Natural interval extension of ``e`` over the box ``b``."""
    lo, hi = eval_interval_arrays(
        e, np.array([b.x.lo]), np.array([b.x.hi]), np.array([b.y.lo]), np.array([b.y.hi])
    )
    return Interval(float(lo[0]), float(hi[0]))


def eval_interval_arrays(e: Expr, xlo, xhi, ylo, yhi) -> tuple[np.ndarray, np.ndarray]:
    """Enclosures of ``e`` over many boxes at once; arrays all of one shape."""
    shape = np.shape(xlo)
    with np.errstate(over="ignore", invalid="ignore"):
        lo, hi = _intervals(e, (np.asarray(xlo, float), np.asarray(xhi, float)),
                            (np.asarray(ylo, float), np.asarray(yhi, float)), shape)
    return lo, hi


def _const(lo: float, hi: float, shape):
    return np.full(shape, lo), np.full(shape, hi)


def _intervals(e: Expr, bx, by, shape):
    match e:
        case Num(value):
            return _const(iv.fraction_down(value), iv.fraction_up(value), shape)
        case Const(name):
            return _const(*(iv.PI_BOUNDS if name == "pi" else iv.E_BOUNDS), shape)
        case Var(name):
            return bx if name == "x" else by
    rec = lambda sub: _intervals(sub, bx, by, shape)  # noqa: E731
    match e:
        case Neg(a):
            out = iv.k_neg(rec(a))
        case Add(a, b):
            out = iv.k_add(rec(a), rec(b))
        case Sub(a, b):
            out = iv.k_sub(rec(a), rec(b))
        case Mul(a, b):
            out = iv.k_mul(rec(a), rec(b))
        case Div(a, b):
            out = iv.k_div(rec(a), rec(b))
        case Pow(a, b):
            q = rational_value(b)
            if q is not None and q.denominator == 1:
                out = iv.k_ipow(rec(a), int(q))
            else:
                out = iv.k_rpow(rec(a), rec(b))
        case Func(name, a):
            out = {"sin": iv.k_sin, "cos": iv.k_cos, "exp": iv.k_exp,
                   "ln": iv.k_ln, "sqrt": iv.k_sqrt}[name](rec(a))
        case _:
            raise TypeError(f"not an expression: {e!r}")
    iv.check_finite(*out)
    return out
