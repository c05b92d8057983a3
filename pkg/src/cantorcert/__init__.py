"""Certified intervals inside f(C x C) for the middle-third Cantor set C."""

__version__ = "0.1.0"

from .certify import (Certificate, Failure, NoCertificate, PointReport, Signature, certify_square,
                      multi_search, point_condition, search)
from .errors import (ConditionLost, DomainError, NotDifferentiable, ParseError, RankCapExceeded)
from .expr import GradTriple, differentiate, eval_interval, eval_point, gradient, parse, to_text
from .interval import Box, Interval, IntervalUnion, arith, subset_with_slack, union_insert
from .oracle import CoverReport, cover_measure_series, depth_cover, hit_test, inner_samples, verify_recursion
from .triadic import (BasicInterval, BasicSquare, TernaryWord, TriadicRational, cantor_membership,
                      children, squares_of_rank, word_to_interval)

__all__ = [
    "BasicInterval", "BasicSquare", "Box", "Certificate", "ConditionLost", "CoverReport", "DomainError",
    "Failure", "GradTriple", "Interval", "IntervalUnion", "NoCertificate", "NotDifferentiable",
    "ParseError", "PointReport", "RankCapExceeded", "Signature", "TernaryWord", "TriadicRational",
    "arith", "cantor_membership", "certify_square", "children", "cover_measure_series", "depth_cover",
    "differentiate", "eval_interval", "eval_point", "gradient", "hit_test", "inner_samples",
    "multi_search", "parse", "point_condition", "search", "squares_of_rank", "subset_with_slack",
    "to_text", "union_insert", "verify_recursion", "word_to_interval",
]
