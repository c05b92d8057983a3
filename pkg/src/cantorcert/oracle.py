"""Brute-force finite-depth ground truth for f(C x C).

``depth_cover`` unions interval enclosures of f over every rank-n basic
square, an outer approximation that shrinks with n.  ``inner_samples``
evaluates f at endpoints of basic intervals, which are true points of C, so
every sample is (up to rounding) a member of f(C x C).  A certificate is
squeezed between the two.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .certify import Certificate
from .errors import BudgetExceeded, ConditionLost
from .expr import Expr, differentiate, eval_interval_arrays, eval_points
from .interval import Box, IntervalUnion, div_down, div_up, merge_arrays, mul_down
from .triadic import BasicSquare, check_rank, rank_numerators

DEFAULT_SQUARE_BUDGET = 50_000_000
# squares evaluated per vectorised batch
CHUNK = 1 << 18


@dataclass(frozen=True)
class CoverReport:
    depth: int
    cover: IntervalUnion
    measure: float
    squares_visited: int

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "measure": self.measure,
            "squares_visited": self.squares_visited,
            "parts": len(self.cover),
            "cover": [[p.lo, p.hi] for p in self.cover],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lo", "hi"])
        for p in self.cover:
            w.writerow([repr(p.lo), repr(p.hi)])
        return buf.getvalue()


def endpoint_enclosures(nums: np.ndarray, n: int):
    """Float enclosures of both endpoints num/3^n and (num+1)/3^n.

    Numerators and 3^n are exact as floats, so directed division is tight.
    Returns (left_lo, left_hi, right_lo, right_hi).
    """
    scale = np.full(len(nums), float(3**n))
    left, right = nums.astype(float), (nums + 1).astype(float)
    return div_down(left, scale), div_up(left, scale), div_down(right, scale), div_up(right, scale)


def endpoint_bounds(nums: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Outward float enclosures of the intervals [num/3^n, (num+1)/3^n]."""
    left_lo, _, _, right_hi = endpoint_enclosures(nums, n)
    return left_lo, right_hi


def _cover_task(args) -> tuple[np.ndarray, np.ndarray]:
    e, n, xs, ys = args
    xlo, xhi = endpoint_bounds(xs, n)
    ylo, yhi = endpoint_bounds(ys, n)
    parts_lo, parts_hi = [], []
    step = max(1, CHUNK // max(len(ys), 1))
    for i in range(0, len(xs), step):
        bx_lo = np.repeat(xlo[i:i + step], len(ys))
        bx_hi = np.repeat(xhi[i:i + step], len(ys))
        k = len(bx_lo) // len(ys)
        by_lo = np.tile(ylo, k)
        by_hi = np.tile(yhi, k)
        lo, hi = eval_interval_arrays(e, bx_lo, bx_hi, by_lo, by_hi)
        lo, hi = merge_arrays(lo, hi)
        parts_lo.append(lo)
        parts_hi.append(hi)
    return merge_arrays(np.concatenate(parts_lo), np.concatenate(parts_hi))


def _prefix_blocks(nums: np.ndarray, n: int) -> list[np.ndarray]:
    """Split sorted numerators by their two leading ternary digits."""
    if n < 2 or len(nums) == 0:
        return [nums]
    keys = nums // 3 ** (n - 2)
    cuts = np.flatnonzero(np.diff(keys)) + 1
    return np.split(nums, cuts)


def depth_cover(e: Expr, n: int, region: Box | None = None, workers: int = 1,
                budget: int = DEFAULT_SQUARE_BUDGET) -> CoverReport:
    check_rank(n)
    region = region or Box.unit()
    xs = rank_numerators(n, Fraction(region.x.lo), Fraction(region.x.hi))
    ys = rank_numerators(n, Fraction(region.y.lo), Fraction(region.y.hi))
    count = len(xs) * len(ys)
    if count > budget:
        raise BudgetExceeded(f"{count} squares at depth {n} exceed the budget {budget}")
    if count == 0:
        return CoverReport(n, IntervalUnion(), 0.0, 0)
    tasks = [(e, n, bx, by) for bx in _prefix_blocks(xs, n) for by in _prefix_blocks(ys, n)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cover_task, tasks))
    else:
        results = [_cover_task(t) for t in tasks]
    lo = np.concatenate([r[0] for r in results])
    hi = np.concatenate([r[1] for r in results])
    cover = IntervalUnion.from_arrays(lo, hi)
    return CoverReport(n, cover, cover.measure, count)


def cover_measure_series(e: Expr, n_max: int, region: Box | None = None, workers: int = 1,
                         budget: int = DEFAULT_SQUARE_BUDGET) -> list[tuple[int, float]]:
    return [(n, depth_cover(e, n, region, workers, budget).measure) for n in range(n_max + 1)]


def _side_endpoints(num: int, rank: int, m: int) -> np.ndarray:
    nums = rank_numerators(m, start=num, start_rank=rank)
    scale = float(3**m)
    return np.concatenate([nums.astype(float) / scale, (nums + 1).astype(float) / scale])


def _check_depth(sq: BasicSquare, m: int) -> None:
    if m < sq.rank:
        raise ValueError(f"sample depth {m} is below the square's rank {sq.rank}")
    check_rank(m)


def inner_samples(e: Expr, sq: BasicSquare, m: int) -> np.ndarray:
    """Sorted distinct values of f at endpoint pairs of rank-m intervals in ``sq``."""
    _check_depth(sq, m)
    xs = _side_endpoints(sq.ix.left.numerator, sq.rank, m)
    ys = _side_endpoints(sq.iy.left.numerator, sq.rank, m)
    vals = eval_points(e, np.repeat(xs, len(ys)), np.tile(ys, len(xs)))
    return np.unique(vals)


def hit_test(cert: Certificate, e: Expr, m: int, grid: float) -> bool:
    """Every multiple of ``grid`` in the image lies near some inner sample.

    "Near" is L * 3^-m with L = sup|fx| + sup|fy| on the square: the rank-m
    sub-square whose image contains a value has corner values that close.
    """
    if grid <= 0:
        raise ValueError("grid must be positive")
    sq = cert.square
    _check_depth(sq, m)
    lo, hi = cert.image.lo, cert.image.hi
    k0, k1 = math.ceil(lo / grid), math.floor(hi / grid)
    if k1 < k0:
        return True
    targets = np.arange(k0, k1 + 1, dtype=float) * grid
    scale = max(abs(lo), abs(hi), 1.0)
    tol = cert.lipschitz * 3.0**-m + 16 * np.finfo(float).eps * scale
    covered = np.zeros(len(targets), dtype=bool)
    xs = _side_endpoints(sq.ix.left.numerator, sq.rank, m)
    ys = _side_endpoints(sq.iy.left.numerator, sq.rank, m)
    step = max(1, CHUNK // len(ys))
    for i in range(0, len(xs), step):
        bx = xs[i:i + step]
        vals = np.sort(eval_points(e, np.repeat(bx, len(ys)), np.tile(ys, len(bx))))
        todo = np.flatnonzero(~covered)
        t = targets[todo]
        j = np.searchsorted(vals, t)
        above = vals[np.minimum(j, len(vals) - 1)]
        below = vals[np.maximum(j - 1, 0)]
        near = np.minimum(np.abs(above - t), np.abs(below - t))
        covered[todo[near <= tol]] = True
        if covered.all():
            return True
    return bool(covered.all())


def _descendant_endpoints(sq: BasicSquare, k: int):
    """Endpoint enclosures of all 4^k descendants, x-major order."""
    n = sq.rank + k
    xs = rank_numerators(n, start=sq.ix.left.numerator, start_rank=sq.rank)
    ys = rank_numerators(n, start=sq.iy.left.numerator, start_rank=sq.rank)
    ex = [np.repeat(a, len(ys)) for a in endpoint_enclosures(xs, n)]
    ey = [np.tile(a, len(xs)) for a in endpoint_enclosures(ys, n)]
    return ex, ey


def _within_ulps(a: float, b: float, ulps: int) -> bool:
    return abs(a - b) <= ulps * np.spacing(max(abs(a), abs(b)))


def verify_recursion(cert: Certificate, e: Expr, depth: int, budget: int = DEFAULT_SQUARE_BUDGET) -> bool:
    """Refine the certified square ``depth`` times and check the image is stable.

    At every level each descendant must keep the certificate's signs and
    dominance/ratio bounds (else ``ConditionLost``), and the union of the
    descendants' monotone corner images must remain one interval matching
    the previous level within 8 ulps per endpoint.
    """
    sq = cert.square
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    check_rank(sq.rank + depth)
    if 4**depth > budget:
        raise BudgetExceeded(f"{4 ** depth} descendants exceed the budget {budget}")
    g = differentiate(e)
    sig = cert.signature
    prev = None
    for k in range(depth + 1):
        (xl_lo, xl_hi, xr_lo, xr_hi), (yl_lo, yl_hi, yr_lo, yr_hi) = _descendant_endpoints(sq, k)
        xlo, xhi, ylo, yhi = xl_lo, xr_hi, yl_lo, yr_hi
        exlo, exhi = eval_interval_arrays(g.fx, xlo, xhi, ylo, yhi)
        eylo, eyhi = eval_interval_arrays(g.fy, xlo, xhi, ylo, yhi)
        signs_ok = ((exlo > 0) if sig.sx > 0 else (exhi < 0)) & ((eylo > 0) if sig.sy > 0 else (eyhi < 0))
        ax_lo, ax_hi = np.minimum(np.abs(exlo), np.abs(exhi)), np.maximum(np.abs(exlo), np.abs(exhi))
        ay_lo, ay_hi = np.minimum(np.abs(eylo), np.abs(eyhi)), np.maximum(np.abs(eylo), np.abs(eyhi))
        (big_lo, big_hi), (small_lo, small_hi) = (
            ((ay_lo, ay_hi), (ax_lo, ax_hi)) if sig.swap else ((ax_lo, ax_hi), (ay_lo, ay_hi))
        )
        ok = signs_ok & (big_lo >= small_hi) & (mul_down(np.full_like(small_lo, 3.0), small_lo) >= big_hi)
        if not ok.all():
            bad = int(np.flatnonzero(~ok)[0])
            raise ConditionLost(
                f"descendant {bad} at level {k} lost the certificate conditions: "
                f"fx in [{exlo[bad]!r}, {exhi[bad]!r}], fy in [{eylo[bad]!r}, {eyhi[bad]!r}]"
            )
        # min corner: left end on an increasing axis, right end on a decreasing one
        left_x, right_x = (xl_lo, xl_hi), (xr_lo, xr_hi)
        left_y, right_y = (yl_lo, yl_hi), (yr_lo, yr_hi)
        cx_min, cx_max = (left_x, right_x) if sig.sx > 0 else (right_x, left_x)
        cy_min, cy_max = (left_y, right_y) if sig.sy > 0 else (right_y, left_y)
        lo, _ = eval_interval_arrays(e, *cx_min, *cy_min)
        _, hi = eval_interval_arrays(e, *cx_max, *cy_max)
        ulo, uhi = merge_arrays(lo, hi)
        if len(ulo) != 1:
            return False
        cur = (float(ulo[0]), float(uhi[0]))
        if prev is not None and not (_within_ulps(cur[0], prev[0], 8) and _within_ulps(cur[1], prev[1], 8)):
            return False
        prev = cur
    return True
