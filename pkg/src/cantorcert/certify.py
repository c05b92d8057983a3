"""Certify basic squares on which f(C x C) fills a whole interval.

On a basic square I x J where the partials have constant signs and the
larger magnitude D and smaller magnitude d satisfy

    inf|D| >= sup|d|      and      3 inf|d| >= sup|D|

the four images of the sub-squares of the two-ends subdivision overlap in a
chain, so their union is the image of the whole square.  The same bounds
hold on every descendant, hence f((C x C) cap (I x J)) = f(I x J), which is
the interval between f at the minimising and maximising corners.  Signs
decide the corners; a dominant y-partial is the x/y swap.
"""

from __future__ import annotations

import heapq
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .errors import DomainError, NumericOverflow
from .expr import GradTriple, eval_interval, eval_point
from .interval import Box, Interval, fraction_down
from .triadic import BasicInterval, BasicSquare, check_rank, interval_words

log = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class PointReport:
    point: tuple[Fraction, Fraction]
    fx: float
    fy: float
    ratio: float
    case: str  # "x-dominant" | "y-dominant" | "boundary" | "fail"
    signs: tuple[int, int]


def _sign(v: float) -> int:
    return (v > 0) - (v < 0)


def point_condition(g: GradTriple, x0, y0) -> PointReport:
    x0, y0 = Fraction(x0), Fraction(y0)
    fx = eval_point(g.fx, float(x0), float(y0))
    fy = eval_point(g.fy, float(x0), float(y0))
    ratio = abs(fx / fy) if fy != 0 else float("inf")
    signs = (_sign(fx), _sign(fy))
    if fx == 0 or fy == 0:
        case = "fail"
    elif any(abs(r - t) <= BOUNDARY_TOL * t for r in (ratio, 1 / ratio) for t in (1.0, 3.0)):
        case = "boundary"
    elif 1 < ratio < 3:
        case = "x-dominant"
    elif 1 < 1 / ratio < 3:
        case = "y-dominant"
    else:
        case = "fail"
    return PointReport((x0, y0), fx, fy, ratio, case, signs)


@dataclass(frozen=True)
class Signature:
    sx: int
    sy: int
    dominant: str  # "x" or "y"
    swap: bool


@dataclass(frozen=True)
class Margins:
    dominance: float  # inf|D| - sup|d|
    ratio: float  # 3 inf|d| - sup|D|
    dominant_floor: float  # inf|D|
    other_floor: float  # inf|d|

    def as_tuple(self) -> tuple[float, float, float, float]:
        return self.dominance, self.ratio, self.dominant_floor, self.other_floor


@dataclass(frozen=True)
class Certificate:
    square: BasicSquare
    signature: Signature
    margins: Margins
    image: Interval
    min_corner: tuple[Fraction, Fraction]
    max_corner: tuple[Fraction, Fraction]
    fx_enclosure: Interval
    fy_enclosure: Interval

    @property
    def rank(self) -> int:
        return self.square.rank

    @property
    def lipschitz(self) -> float:
        return self.fx_enclosure.mag() + self.fy_enclosure.mag()


@dataclass(frozen=True)
class Failure:
    reason: str  # SignAmbiguous | DominanceFails | RatioFails | DomainError | Degenerate
    detail: str
    fx_enclosure: Interval | None = None
    fy_enclosure: Interval | None = None

    def __bool__(self) -> bool:
        return False


@dataclass
class NoCertificate:
    nodes_expanded: int = 0
    deepest_rank: int = 0
    pruned: int = 0
    budget_exhausted: bool = False

    def __bool__(self) -> bool:
        return False


def _corners(sq: BasicSquare, sx: int, sy: int):
    x0, x1 = sq.ix.bounds()
    y0, y1 = sq.iy.bounds()
    lo = (x0 if sx > 0 else x1, y0 if sy > 0 else y1)
    hi = (x1 if sx > 0 else x0, y1 if sy > 0 else y0)
    return lo, hi


def _value_enclosure(g: GradTriple, corner: tuple[Fraction, Fraction]) -> Interval:
    return eval_interval(g.f, Box.from_fractions(corner[0], corner[0], corner[1], corner[1]))


def check_criterion(ex: Interval, ey: Interval) -> tuple[Signature, Margins] | Failure:
    """Sign, dominance and ratio conditions on a pair of partial enclosures."""
    if ex.contains_zero() or ey.contains_zero():
        return Failure("SignAmbiguous", f"a partial may vanish: fx in {ex}, fy in {ey}", ex, ey)
    swap = ey.mig() > ex.mig()
    big, small = (ey, ex) if swap else (ex, ey)
    if not big.mig() >= small.mag():
        return Failure("DominanceFails", f"inf|D| = {big.mig()!r} < sup|d| = {small.mag()!r}", ex, ey)
    slack = 3 * Fraction(small.mig()) - Fraction(big.mag())
    if slack < 0:
        return Failure("RatioFails", f"3 inf|d| = {3 * small.mig()!r} < sup|D| = {big.mag()!r}", ex, ey)
    sig = Signature(_sign(ex.lo), _sign(ey.lo), "y" if swap else "x", swap)
    margins = Margins(
        fraction_down(Fraction(big.mig()) - Fraction(small.mag())),
        fraction_down(slack),
        big.mig(),
        small.mig(),
    )
    return sig, margins


def certify_square(g: GradTriple, sq: BasicSquare) -> Certificate | Failure:
    box = sq.box()
    try:
        eval_interval(g.f, box)
        ex = eval_interval(g.fx, box)
        ey = eval_interval(g.fy, box)
    except (DomainError, NumericOverflow) as exc:
        return Failure("DomainError", str(exc))
    checked = check_criterion(ex, ey)
    if isinstance(checked, Failure):
        return checked
    sig, margins = checked
    lo_corner, hi_corner = _corners(sq, sig.sx, sig.sy)
    try:
        f_lo = _value_enclosure(g, lo_corner)
        f_hi = _value_enclosure(g, hi_corner)
    except (DomainError, NumericOverflow) as exc:
        return Failure("DomainError", str(exc), ex, ey)
    # inward: the upper bound of the min value, the lower bound of the max value
    image_lo, image_hi = f_lo.hi, f_hi.lo
    if not image_lo < image_hi:
        return Failure("Degenerate", f"image [{image_lo!r}, {image_hi!r}] is empty after inward rounding", ex, ey)
    return Certificate(sq, sig, margins, Interval(image_lo, image_hi), lo_corner, hi_corner, ex, ey)


def ratio_impossible(ex: Interval, ey: Interval) -> bool:
    """True when |fx/fy| lies outside [1/3, 3] on the whole square.

    Every certifiable sub-square needs the ratio inside [1/3, 3] at each of
    its points, so such a square can be dropped with all its descendants.
    """
    if ex.contains_zero() or ey.contains_zero():
        return False
    ax_lo, ax_hi = Fraction(ex.mig()), Fraction(ex.mag())
    ay_lo, ay_hi = Fraction(ey.mig()), Fraction(ey.mag())
    return ax_lo > 3 * ay_hi or 3 * ax_hi < ay_lo


# ------------------------------------------------------------------ search


def _score(g: GradTriple, sq: BasicSquare) -> float:
    """Rank plus the distance of the midpoint partial ratio from 2."""
    x0, x1 = sq.ix.bounds()
    y0, y1 = sq.iy.bounds()
    cx, cy = float((x0 + x1) / 2), float((y0 + y1) / 2)
    try:
        fx, fy = abs(eval_point(g.fx, cx, cy)), abs(eval_point(g.fy, cx, cy))
    except (DomainError, NumericOverflow):
        return float("inf")
    small, big = min(fx, fy), max(fx, fy)
    if small == 0:
        return float("inf")
    return sq.rank + abs(big / small - 2.0)


def _region_fractions(region: Box):
    return (Fraction(region.x.lo), Fraction(region.x.hi), Fraction(region.y.lo), Fraction(region.y.hi))


def _inside(sq: BasicSquare, bounds) -> bool:
    x0, x1 = sq.ix.bounds()
    y0, y1 = sq.iy.bounds()
    return bounds[0] <= x0 and x1 <= bounds[1] and bounds[2] <= y0 and y1 <= bounds[3]


def _meets(sq: BasicSquare, bounds) -> bool:
    x0, x1 = sq.ix.bounds()
    y0, y1 = sq.iy.bounds()
    return x0 <= bounds[1] and bounds[0] <= x1 and y0 <= bounds[3] and bounds[2] <= y1


def _certify_job(args):
    g, key = args
    return certify_square(g, BasicSquare.from_words(*key))


@dataclass
class _Speculator:
    """Certifies a batch of upcoming frontier squares ahead of time.

    The traversal order is fixed by the priority queue alone; workers only
    fill a cache, so results do not depend on the worker count.
    """

    g: GradTriple
    workers: int
    cache: dict = field(default_factory=dict)
    pool: ProcessPoolExecutor | None = None

    def __enter__(self):
        if self.workers > 1:
            self.pool = ProcessPoolExecutor(max_workers=self.workers)
        return self

    def __exit__(self, *exc):
        if self.pool is not None:
            self.pool.shutdown()

    def get(self, key, upcoming) -> Certificate | Failure:
        if key not in self.cache:
            if self.pool is None:
                self.cache[key] = certify_square(self.g, BasicSquare.from_words(*key))
            else:
                batch = [key] + [k for k in upcoming if k not in self.cache and k != key]
                for k, res in zip(batch, self.pool.map(_certify_job, [(self.g, k) for k in batch])):
                    self.cache[k] = res
        return self.cache.pop(key)


def _seed_squares(seed: tuple[Fraction, Fraction], max_rank: int) -> Iterator[BasicSquare]:
    sx, sy = (Fraction(v) for v in seed)
    for k in range(max_rank + 1):
        for wx in interval_words(k, sx, sx):
            for wy in interval_words(k, sy, sy):
                yield BasicSquare(BasicInterval(wx), BasicInterval(wy))


def iter_certificates(
    g: GradTriple,
    region: Box | None = None,
    max_rank: int = 12,
    budget: int = 100_000,
    workers: int = 1,
    seed: tuple[Fraction, Fraction] | None = None,
    stats: NoCertificate | None = None,
) -> Iterator[Certificate]:
    """Best-first traversal yielding certificates in a deterministic order.

    Squares are ranked by their rank plus how far the midpoint ratio of the
    larger to the smaller partial is from 2, ties broken by (x-word, y-word).
    Without the rank term the traversal dives along lines where the ratio is
    constant (the diagonal for x*y) all the way to ``max_rank``.  A seed point
    first tries the chain of squares containing it, rank by rank.
    """
    check_rank(max_rank)
    region = region or Box.unit()
    bounds = _region_fractions(region)
    stats = stats if stats is not None else NoCertificate()
    certified: list[BasicSquare] = []

    if seed is not None:
        for sq in _seed_squares(seed, max_rank):
            if stats.nodes_expanded >= budget:
                break
            if not _inside(sq, bounds):
                continue
            stats.nodes_expanded += 1
            stats.deepest_rank = max(stats.deepest_rank, sq.rank)
            res = certify_square(g, sq)
            if res:
                certified.append(sq)
                yield res
                break

    heap: list[tuple[float, str, str]] = []
    root = BasicSquare.from_words("", "")
    if _meets(root, bounds):
        heap.append((_score(g, root), "", ""))

    with _Speculator(g, workers) as spec:
        while heap:
            if stats.nodes_expanded >= budget:
                stats.budget_exhausted = True
                return
            _, xw, yw = heapq.heappop(heap)
            sq = BasicSquare.from_words(xw, yw)
            if any(c.contains_square(sq) for c in certified):
                continue
            stats.nodes_expanded += 1
            stats.deepest_rank = max(stats.deepest_rank, sq.rank)
            if _inside(sq, bounds):
                upcoming = [(k[1], k[2]) for k in heapq.nsmallest(4 * workers - 1, heap)] if workers > 1 else []
                res = spec.get((xw, yw), upcoming)
                if res:
                    certified.append(sq)
                    yield res
                    continue
                if res.fx_enclosure is not None and ratio_impossible(res.fx_enclosure, res.fy_enclosure):
                    stats.pruned += 1
                    continue
            if sq.rank >= max_rank:
                continue
            for child in sq.children():
                if _meets(child, bounds):
                    heapq.heappush(heap, (_score(g, child), *child.key))


def search(g: GradTriple, region: Box | None = None, max_rank: int = 12, budget: int = 100_000,
           workers: int = 1, seed=None) -> Certificate | NoCertificate:
    stats = NoCertificate()
    for cert in iter_certificates(g, region, max_rank, budget, workers, seed, stats):
        log.debug("certified %s after %d nodes", cert.square, stats.nodes_expanded)
        return cert
    return stats


def multi_search(g: GradTriple, region: Box | None = None, max_rank: int = 12, budget: int = 100_000,
                 max_certs: int = 5, workers: int = 1, seed=None) -> list[Certificate]:
    out = []
    if max_certs <= 0:
        return out
    for cert in iter_certificates(g, region, max_rank, budget, workers, seed):
        out.append(cert)
        if len(out) >= max_certs:
            break
    return out
