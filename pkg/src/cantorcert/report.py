"""JSON-ready views of certificates and validation results."""

from __future__ import annotations

import json
from fractions import Fraction

from .certify import Certificate, NoCertificate, PointReport
from .triadic import TriadicRational

SCHEMA_VERSION = 1


def triadic_text(q: Fraction, rank: int) -> str:
    num = q * 3**rank
    if num.denominator != 1:
        raise ValueError(f"{q} is not a multiple of 3^-{rank}")
    return str(TriadicRational(num.numerator, rank))


def certificate_to_dict(cert: Certificate) -> dict:
    sq, r = cert.square, cert.rank
    corner = lambda c: [triadic_text(c[0], r), triadic_text(c[1], r)]  # noqa: E731
    return {
        "square": {
            "rank": r,
            "x_word": sq.ix.word.digits,
            "y_word": sq.iy.word.digits,
            "corners": {
                "x": [str(sq.ix.left), str(sq.ix.right)],
                "y": [str(sq.iy.left), str(sq.iy.right)],
            },
        },
        "exact_corners": {"min": corner(cert.min_corner), "max": corner(cert.max_corner)},
        "signature": {
            "sx": cert.signature.sx,
            "sy": cert.signature.sy,
            "dominant": cert.signature.dominant,
            "swap": cert.signature.swap,
        },
        "margins": {
            "dominance": cert.margins.dominance,
            "ratio": cert.margins.ratio,
            "dominant_floor": cert.margins.dominant_floor,
            "other_floor": cert.margins.other_floor,
        },
        "enclosures": {
            "fx": [cert.fx_enclosure.lo, cert.fx_enclosure.hi],
            "fy": [cert.fy_enclosure.lo, cert.fy_enclosure.hi],
        },
        "image": {"lo": cert.image.lo, "hi": cert.image.hi},
    }


def point_report_to_dict(rep: PointReport) -> dict:
    return {
        "point": [str(rep.point[0]), str(rep.point[1])],
        "fx": rep.fx,
        "fy": rep.fy,
        "ratio": rep.ratio,
        "case": rep.case,
        "signs": list(rep.signs),
    }


def search_stats_to_dict(stats: NoCertificate) -> dict:
    return {
        "nodes_expanded": stats.nodes_expanded,
        "deepest_rank": stats.deepest_rank,
        "pruned": stats.pruned,
        "budget_exhausted": stats.budget_exhausted,
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"
