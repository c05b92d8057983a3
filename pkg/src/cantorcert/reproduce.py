"""Canned reproduction suites for the classical and corollary examples."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .certify import Certificate, certify_square, search
from .expr import differentiate, eval_exact, parse
from .interval import Box, subset_with_slack
from .oracle import cover_measure_series, depth_cover
from .triadic import BasicSquare
from .validate import validate

PRODUCT_MEASURE_FLOOR = Fraction(17, 21)
PRODUCT_MEASURE_CEIL = Fraction(8, 9)

# (expression, seed point) pairs; seeds where a witness is given explicitly
COROLLARY = [
    ("x^2*y", None),
    ("x^2+y^2", None),
    ("x^2-y^2", None),
    ("x+y^2", (Fraction(8, 9), Fraction(1, 3))),
    ("x-y^2", None),
    ("sin(x)*cos(y)", (Fraction(2, 3), Fraction(2, 3))),
]

SUITES = ("steinhaus-sum", "steinhaus-diff", "product", "corollary")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _certify_text(text: str, seed=None, max_rank: int = 12, budget: int = 100_000, workers: int = 1):
    e = parse(text)
    g = differentiate(e)
    return e, g, search(g, Box.unit(), max_rank, budget, workers, seed)


def steinhaus(text: str, lo: int, hi: int, sy: int) -> list[Check]:
    e, _, cert = _certify_text(text)
    if not cert:
        return [Check(f"{text} certifies", False, f"no certificate ({cert})")]
    exact = (cert.min_corner, cert.max_corner)
    f_exact = [eval_exact(e, *c) for c in exact]
    val = validate(cert, e, oracle_depth=6, hit_depth=8, grid=1e-2, recursion_depth=4)
    return [
        Check(f"{text} certifies at rank 0", cert.rank == 0, f"rank {cert.rank}"),
        Check(f"{text} signature sy={sy:+d}", cert.signature.sy == sy, str(cert.signature)),
        Check(f"{text} exact corners give [{lo}, {hi}]", f_exact == [lo, hi],
              f"corners {exact[0]} -> {exact[1]}"),
        Check(f"{text} image within 1e-12 of [{lo}, {hi}]",
              abs(cert.image.lo - lo) <= 1e-12 and abs(cert.image.hi - hi) <= 1e-12, str(cert.image)),
        Check(f"{text} oracle validation", val.ok, str(val.to_dict())),
    ]


PRODUCT_SQUARE = ("LRR", "RLL")  # [8/27, 9/27] x [18/27, 19/27]


def product_checks(workers: int = 1, depth: int = 10) -> list[Check]:
    e, g, cert = _certify_text("x*y", max_rank=12, budget=10_000, workers=workers)
    checks = [Check("x*y certifies at rank <= 4 within 10^4 nodes", bool(cert) and cert.rank <= 4,
                    f"rank {cert.rank}" if cert else str(cert))]
    sq = BasicSquare.from_words(*PRODUCT_SQUARE)
    fixed = certify_square(g, sq)
    lo, hi = Fraction(144, 729), Fraction(171, 729)
    if fixed:
        ok = (Fraction(fixed.image.lo) >= lo and Fraction(fixed.image.hi) <= hi
              and fixed.image.lo - float(lo) <= 1e-12 and float(hi) - fixed.image.hi <= 1e-12)
        checks.append(Check("[8/27,9/27]x[18/27,19/27] image ~ [144/729, 171/729]", ok, str(fixed.image)))
    else:
        checks.append(Check("[8/27,9/27]x[18/27,19/27] certifies", False, fixed.detail))
    if cert:
        contained = [subset_with_slack(cert.image, depth_cover(e, n, workers=workers).cover)
                     for n in range(1, depth + 1)]
        checks.append(Check(f"x*y image inside depth covers n=1..{depth}", all(contained), str(contained)))
    series = cover_measure_series(e, depth, workers=workers)
    measures = [m for _, m in series]
    floor = float(PRODUCT_MEASURE_FLOOR)
    checks.append(Check("cover measure starts at 1", measures[0] == 1.0, repr(measures[0])))
    checks.append(Check("cover measure at n=1 is 8/9", abs(measures[1] - 8 / 9) <= 1e-12, repr(measures[1])))
    slack = [8 * abs(a) * 2.0**-52 for a in measures]
    checks.append(Check("cover measures non-increasing",
                        all(b <= a + s for a, b, s in zip(measures, measures[1:], slack)),
                        ", ".join(f"{m:.10f}" for m in measures)))
    checks.append(Check("cover measures >= 17/21", all(m >= floor for m in measures), f"min {min(measures):.10f}"))
    return checks


def corollary_checks(workers: int = 1) -> list[Check]:
    checks = []
    for text, seed in COROLLARY:
        e, _, cert = _certify_text(text, seed=seed, workers=workers)
        if not cert:
            checks.append(Check(text, False, f"no certificate ({cert})"))
            continue
        val = validate(cert, e, oracle_depth=10, hit_depth=max(12, cert.rank), grid=1e-3,
                       recursion_depth=8, workers=workers)
        detail = (f"rank {cert.rank} square {cert.square.key} image {cert.image}; "
                  f"cover={val.cover_contained} hit={val.hit_test} recursion={val.recursion_ok}")
        checks.append(Check(text, val.ok, detail))
    return checks


def run_suite(name: str, workers: int = 1) -> list[Check]:
    if name == "steinhaus-sum":
        return steinhaus("x+y", 0, 2, +1)
    if name == "steinhaus-diff":
        return steinhaus("x-y", -1, 1, -1)
    if name == "product":
        return product_checks(workers)
    if name == "corollary":
        return corollary_checks(workers)
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")


def certificate_for(text: str, seed=None) -> Certificate | None:
    _, _, cert = _certify_text(text, seed=seed)
    return cert or None
