"""Outward-rounded interval arithmetic over float64, scalar and vectorised.

Every kernel works on pairs of numpy arrays ``(lo, hi)`` so the same code
serves single boxes and the million-square batches of the oracle.  Basic
arithmetic is rounded with error-free transformations (TwoSum, Dekker's
TwoProduct): an endpoint is nudged one step only when the float result is
actually inexact in the wrong direction.  Library transcendentals are not
correctly rounded, so their endpoints are pushed out two steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, NumericOverflow

_INF = np.inf
_SPLITTER = 134217729.0  # 2**27 + 1
# below / above these magnitudes the error-free transforms are not trusted
_TINY = 2.0**-960
_HUGE = 2.0**960

# float enclosure of pi/2: math.pi/2 is below the true value
_HALF_PI_LO = math.pi / 2
_HALF_PI_HI = math.nextafter(math.pi / 2, math.inf)
PI_BOUNDS = (math.pi, math.nextafter(math.pi, math.inf))
E_BOUNDS = (math.e, math.nextafter(math.e, math.inf))


def down(x, steps: int = 1):
    for _ in range(steps):
        x = np.nextafter(x, -_INF)
    return x


def up(x, steps: int = 1):
    for _ in range(steps):
        x = np.nextafter(x, _INF)
    return x


def _unsafe(*xs):
    flag = False
    for x in xs:
        ax = np.abs(x)
        flag = flag | ((ax < _TINY) & (ax != 0)) | (ax > _HUGE)
    return flag


def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    with np.errstate(over="ignore", invalid="ignore"):
        p = a * b
        ah, al = _split(a)
        bh, bl = _split(b)
        err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def add_down(a, b):
    s, e = _two_sum(a, b)
    return np.where((e < 0) | _unsafe(s), down(s), s)


def add_up(a, b):
    s, e = _two_sum(a, b)
    return np.where((e > 0) | _unsafe(s), up(s), s)


def _flushed(r, a, b):
    # nonzero operands whose product or quotient underflowed to 0
    return (r == 0) & (a != 0) & (b != 0) & np.isfinite(b)


def mul_down(a, b):
    p, e = _two_prod(a, b)
    return np.where((e < 0) | _unsafe(p, a, b) | _flushed(p, a, b), down(p), p)


def mul_up(a, b):
    p, e = _two_prod(a, b)
    return np.where((e > 0) | _unsafe(p, a, b) | _flushed(p, a, b), up(p), p)


def _div_residual_sign(a, b, q):
    p, e = _two_prod(q, b)
    r = (a - p) - e
    return np.sign(r) * np.sign(b)


def div_down(a, b):
    q = a / b
    s = _div_residual_sign(a, b, q)
    return np.where((s < 0) | _unsafe(q, a, b) | _flushed(q, a, b), down(q), q)


def div_up(a, b):
    q = a / b
    s = _div_residual_sign(a, b, q)
    return np.where((s > 0) | _unsafe(q, a, b) | _flushed(q, a, b), up(q), q)


# ---------------------------------------------------------------- kernels
# Each kernel maps (lo, hi) array pairs to an (lo, hi) array pair.


def k_add(x, y):
    return add_down(x[0], y[0]), add_up(x[1], y[1])


def k_neg(x):
    return -x[1], -x[0]


def k_sub(x, y):
    return k_add(x, k_neg(y))


def k_mul(x, y):
    cands = [(x[i], y[j]) for i in (0, 1) for j in (0, 1)]
    lo = np.minimum.reduce([mul_down(a, b) for a, b in cands])
    hi = np.maximum.reduce([mul_up(a, b) for a, b in cands])
    return lo, hi


def k_div(x, y):
    if np.any((y[0] <= 0) & (y[1] >= 0)):
        raise DomainError("division by an interval containing 0")
    cands = [(x[i], y[j]) for i in (0, 1) for j in (0, 1)]
    lo = np.minimum.reduce([div_down(a, b) for a, b in cands])
    hi = np.maximum.reduce([div_up(a, b) for a, b in cands])
    return lo, hi


def _pow_nonneg(b, n: int, rounder):
    """b**n for b >= 0 by binary powering, every product rounded one way."""
    result = np.ones_like(b)
    base = b
    while n:
        if n & 1:
            result = rounder(result, base)
        n >>= 1
        if n:
            base = rounder(base, base)
    return result


def k_ipow(x, n: int):
    lo, hi = x
    if n == 0:
        return np.ones_like(lo), np.ones_like(hi)
    if n < 0:
        if np.any((lo <= 0) & (hi >= 0)):
            raise DomainError("negative power of an interval containing 0")
        one = np.ones_like(lo)
        return k_div((one, one), k_ipow(x, -n))
    pd = lambda v: _pow_nonneg(v, n, mul_down)  # noqa: E731
    pu = lambda v: _pow_nonneg(v, n, mul_up)  # noqa: E731
    alo, ahi = np.abs(lo), np.abs(hi)
    if n % 2 == 0:
        mag_hi = np.maximum(alo, ahi)
        mag_lo = np.where(lo >= 0, lo, np.where(hi <= 0, -hi, 0.0))
        return np.maximum(pd(mag_lo), 0.0), pu(mag_hi)
    new_lo = np.where(lo >= 0, pd(alo), -pu(alo))
    new_hi = np.where(hi >= 0, pu(ahi), -pd(ahi))
    return new_lo, new_hi


def k_exp(x):
    with np.errstate(over="ignore"):
        lo = np.maximum(down(np.exp(x[0]), 2), 0.0)
        hi = up(np.exp(x[1]), 2)
    return lo, hi


def k_ln(x):
    if np.any(x[0] <= 0):
        raise DomainError("ln of an interval not strictly positive")
    return down(np.log(x[0]), 2), up(np.log(x[1]), 2)


def k_sqrt(x):
    if np.any(x[0] < 0):
        raise DomainError("sqrt of an interval with negative part")
    # IEEE sqrt is correctly rounded, one step suffices
    return np.maximum(down(np.sqrt(x[0])), 0.0), up(np.sqrt(x[1]))


def k_rpow(x, e):
    """x**e for a real exponent interval e, via exp(e * ln x); needs x > 0."""
    if np.any(x[0] <= 0):
        raise DomainError("non-integer power of an interval not strictly positive")
    return k_exp(k_mul(e, k_ln(x)))


def _half_pi_multiple_window(m):
    a = m * _HALF_PI_LO
    b = m * _HALF_PI_HI
    return down(np.minimum(a, b)), up(np.maximum(a, b))


def _trig(x, fn, max_residue: int, min_residue: int):
    lo, hi = x
    vlo, vhi = fn(lo), fn(hi)
    out_lo = np.maximum(down(np.minimum(vlo, vhi), 2), -1.0)
    out_hi = np.minimum(up(np.maximum(vlo, vhi), 2), 1.0)
    # multiples of pi/2 are only located reliably for moderate arguments
    wide = ((hi - lo) >= 6.0) | (np.abs(lo) > 1e6) | (np.abs(hi) > 1e6)
    m0 = np.floor(lo / _HALF_PI_HI) - 2
    for k in range(10):
        m = m0 + k
        c_lo, c_hi = _half_pi_multiple_window(m)
        hit = (c_hi >= lo) & (c_lo <= hi)
        residue = np.mod(m, 4)
        out_hi = np.where(hit & (residue == max_residue), 1.0, out_hi)
        out_lo = np.where(hit & (residue == min_residue), -1.0, out_lo)
    out_lo = np.where(wide, -1.0, out_lo)
    out_hi = np.where(wide, 1.0, out_hi)
    return out_lo, out_hi


def k_sin(x):
    # extrema of sin at m*pi/2 with m = 1 (mod 4) and m = 3 (mod 4)
    return _trig(x, np.sin, 1, 3)


def k_cos(x):
    return _trig(x, np.cos, 0, 2)


def check_finite(lo, hi) -> None:
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise NumericOverflow("interval endpoint overflowed to a non-finite value")


# ---------------------------------------------------------------- scalar API


def fraction_down(q: Fraction) -> float:
    f = float(q)
    return math.nextafter(f, -math.inf) if Fraction(f) > q else f


def fraction_up(q: Fraction) -> float:
    f = float(q)
    return math.nextafter(f, math.inf) if Fraction(f) < q else f


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval endpoints must not be NaN")
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, v: float) -> Interval:
        return cls(float(v), float(v))

    @classmethod
    def from_fraction(cls, lo: Fraction | int | str, hi: Fraction | int | str | None = None) -> Interval:
        lo = Fraction(lo)
        hi = lo if hi is None else Fraction(hi)
        return cls(fraction_down(lo), fraction_up(hi))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def mig(self) -> float:
        if self.lo <= 0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def contains(self, v) -> bool:
        if isinstance(v, Interval):
            return self.lo <= v.lo and v.hi <= self.hi
        return self.lo <= v <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def _arrays(self):
        return np.array([self.lo]), np.array([self.hi])

    def __add__(self, other):
        return arith("add", self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return arith("sub", self, _coerce(other))

    def __rsub__(self, other):
        return arith("sub", _coerce(other), self)

    def __mul__(self, other):
        return arith("mul", self, _coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return arith("div", self, _coerce(other))

    def __rtruediv__(self, other):
        return arith("div", _coerce(other), self)

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __pow__(self, exponent):
        return arith("pow", self, exponent=exponent)

    def __str__(self) -> str:
        return f"[{self.lo:.17g}, {self.hi:.17g}]"


def _coerce(v) -> Interval:
    if isinstance(v, Interval):
        return v
    if isinstance(v, (int, Fraction)):
        return Interval.from_fraction(v)
    return Interval.point(v)


_UNARY = {"neg": k_neg, "sin": k_sin, "cos": k_cos, "exp": k_exp, "ln": k_ln, "sqrt": k_sqrt}
_BINARY = {"add": k_add, "sub": k_sub, "mul": k_mul, "div": k_div}


def arith(op: str, *args: Interval, exponent: Fraction | int | None = None) -> Interval:
    """Outward-rounded enclosure of ``op`` applied to interval arguments."""
    arrays = [a._arrays() for a in args]
    if op in _UNARY:
        (x,) = arrays
        lo, hi = _UNARY[op](x)
    elif op in _BINARY:
        x, y = arrays
        lo, hi = _BINARY[op](x, y)
    elif op == "pow":
        (x,) = arrays
        q = Fraction(exponent)
        if q.denominator == 1:
            lo, hi = k_ipow(x, int(q))
        else:
            e = Interval.from_fraction(q)._arrays()
            lo, hi = k_rpow(x, e)
    else:
        raise ValueError(f"unknown operation {op!r}")
    check_finite(lo, hi)
    return Interval(float(lo[0]), float(hi[0]))


@dataclass(frozen=True)
class Box:
    x: Interval
    y: Interval

    @classmethod
    def unit(cls) -> Box:
        return cls(Interval(0.0, 1.0), Interval(0.0, 1.0))

    @classmethod
    def from_bounds(cls, x0: float, x1: float, y0: float, y1: float) -> Box:
        return cls(Interval(float(x0), float(x1)), Interval(float(y0), float(y1)))

    @classmethod
    def from_fractions(cls, x0, x1, y0, y1) -> Box:
        return cls(Interval.from_fraction(x0, x1), Interval.from_fraction(y0, y1))

    @classmethod
    def point(cls, x, y) -> Box:
        return cls(_coerce(x), _coerce(y))

    def contains_box(self, other: Box) -> bool:
        return self.x.contains(other.x) and self.y.contains(other.y)


# ---------------------------------------------------------------- unions


def merge_arrays(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort-and-sweep merge; touching or overlapping intervals coalesce."""
    if len(lo) == 0:
        return lo, hi
    order = np.lexsort((hi, lo))
    lo, hi = lo[order], hi[order]
    reach = np.maximum.accumulate(hi)
    starts = np.ones(len(lo), dtype=bool)
    starts[1:] = lo[1:] > reach[:-1]
    idx = np.flatnonzero(starts)
    ends = np.append(idx[1:], len(lo)) - 1
    return lo[idx], reach[ends]


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted union of pairwise disjoint closed intervals with positive gaps."""

    parts: tuple[Interval, ...] = ()

    @classmethod
    def from_intervals(cls, intervals: Iterable[Interval]) -> IntervalUnion:
        items = list(intervals)
        lo = np.array([v.lo for v in items], dtype=float)
        hi = np.array([v.hi for v in items], dtype=float)
        return cls.from_arrays(lo, hi)

    @classmethod
    def from_arrays(cls, lo: np.ndarray, hi: np.ndarray) -> IntervalUnion:
        mlo, mhi = merge_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
        return cls(tuple(Interval(float(a), float(b)) for a, b in zip(mlo, mhi)))

    def insert(self, v: Interval) -> IntervalUnion:
        return union_insert(self, v)

    def union(self, other: IntervalUnion) -> IntervalUnion:
        return IntervalUnion.from_intervals(self.parts + other.parts)

    @property
    def measure(self) -> float:
        return math.fsum(p.hi - p.lo for p in self.parts)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.array([p.lo for p in self.parts], dtype=float),
                np.array([p.hi for p in self.parts], dtype=float))

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)


def union_insert(u: IntervalUnion, v: Interval) -> IntervalUnion:
    parts = list(u.parts)
    lo, hi = v.lo, v.hi
    keep = []
    for p in parts:
        if p.hi < lo or p.lo > hi:
            keep.append(p)
        else:
            lo, hi = min(lo, p.lo), max(hi, p.hi)
    keep.append(Interval(lo, hi))
    keep.sort(key=lambda p: p.lo)
    return IntervalUnion(tuple(keep))


def subset_with_slack(inner: Interval, u: IntervalUnion, slack: float = 0.0) -> bool:
    """Is ``inner`` shrunk by ``slack`` at both ends inside one part of ``u``?

    Comparisons are exact on the rational values of the floats involved.
    """
    a = Fraction(inner.lo) + Fraction(slack)
    b = Fraction(inner.hi) - Fraction(slack)
    if a > b:
        return True
    return any(Fraction(p.lo) <= a and b <= Fraction(p.hi) for p in u.parts)


def hull(intervals: Sequence[Interval]) -> Interval:
    return Interval(min(v.lo for v in intervals), max(v.hi for v in intervals))
