"""Run the oracle checks against one certificate."""

from __future__ import annotations

from dataclasses import dataclass, field

from .certify import Certificate
from .expr import Expr
from .interval import subset_with_slack
from .oracle import depth_cover, hit_test, verify_recursion
from .triadic import rank_cap


@dataclass
class Validation:
    cover_contained: bool
    hit_test: bool
    recursion_ok: bool
    depths: list[int] = field(default_factory=list)
    hit_depth: int = 0
    hit_grid: float = 0.0
    recursion_depth: int = 0

    @property
    def ok(self) -> bool:
        return self.cover_contained and self.hit_test and self.recursion_ok

    def to_dict(self) -> dict:
        return {
            "cover_contained": self.cover_contained,
            "hit_test": self.hit_test,
            "recursion_ok": self.recursion_ok,
            "depths": self.depths,
            "hit_depth": self.hit_depth,
            "hit_grid": self.hit_grid,
            "recursion_depth": self.recursion_depth,
        }


def default_hit_depth(rank: int) -> int:
    return min(max(min(rank + 10, 12), rank + 2), rank_cap())


def validate(cert: Certificate, e: Expr, oracle_depth: int = 10, hit_depth: int | None = None,
             grid: float | None = None, recursion_depth: int = 8, workers: int = 1) -> Validation:
    """Outer covers, inner samples and refinement stability for ``cert``.

    Covers are taken over the certified square only; they are subsets of the
    covers over the whole unit square, so containment there is the stronger
    statement and costs 4^(n - rank) squares instead of 4^n.
    """
    cap = rank_cap()
    region = cert.square.box()
    depths = list(range(0, min(oracle_depth, cap) + 1))
    contained = all(
        subset_with_slack(cert.image, depth_cover(e, n, region, workers).cover, 0.0) for n in depths
    )
    m = default_hit_depth(cert.rank) if hit_depth is None else hit_depth
    grid = cert.image.width / 1000 if grid is None else grid
    hit = hit_test(cert, e, m, grid)
    rdepth = max(0, min(recursion_depth, cap - cert.rank))
    rec = verify_recursion(cert, e, rdepth)
    return Validation(contained, hit, rec, depths, m, grid, rdepth)
