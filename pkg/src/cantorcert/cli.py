"""Command-line front end: ``certify``, ``cover`` and ``reproduce``.

Exit codes: 0 success, 1 error (parse, domain, failed validation),
2 no certificate found.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .certify import point_condition, search
from .errors import CantorCertError, ParseError
from .expr import differentiate, parse, to_text
from .interval import Box
from .oracle import depth_cover
from .report import (SCHEMA_VERSION, certificate_to_dict, dumps, point_report_to_dict,
                     search_stats_to_dict)
from .reproduce import SUITES, run_suite
from .triadic import cantor_membership, rank_cap
from .validate import validate

EXIT_OK, EXIT_ERROR, EXIT_NO_CERTIFICATE = 0, 1, 2

log = logging.getLogger("cantorcert")


@dataclass
class RunConfig:
    expression: str
    region: tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0)
    max_rank: int = 12
    budget: int = 100_000
    oracle_depth: int = 10
    seed_point: tuple[Fraction, Fraction] | None = None
    output_format: str = "json"
    workers: int = 1

    def __post_init__(self):
        x0, x1, y0, y1 = self.region
        if not (x0 <= x1 and y0 <= y1):
            raise ValueError(f"invalid region {self.region}")
        if self.max_rank > rank_cap():
            raise ValueError(f"max rank {self.max_rank} exceeds the rank cap {rank_cap()}")
        if self.output_format not in ("json", "csv"):
            raise ValueError(f"unknown format {self.output_format!r}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    @property
    def box(self) -> Box:
        return Box.from_bounds(*self.region)


def cmd_certify(config: RunConfig) -> tuple[int, dict]:
    e = parse(config.expression)
    g = differentiate(e)
    report: dict = {"schema": SCHEMA_VERSION, "expression": to_text(e),
                    "derivatives": {"fx": to_text(g.fx), "fy": to_text(g.fy)}}
    if config.seed_point is not None:
        sx, sy = config.seed_point
        for v in (sx, sy):
            if not (0 <= v <= 1 and cantor_membership(v)):
                raise ValueError(f"seed coordinate {v} is not a point of the Cantor set")
        report["seed"] = point_report_to_dict(point_condition(g, sx, sy))
    result = search(g, config.box, config.max_rank, config.budget, config.workers, config.seed_point)
    if not result:
        report["status"] = "no-certificate"
        report["search"] = search_stats_to_dict(result)
        return EXIT_NO_CERTIFICATE, report
    cert = result
    report["certificate"] = certificate_to_dict(cert)
    val = validate(cert, e, oracle_depth=config.oracle_depth, workers=config.workers)
    report["oracle"] = val.to_dict()
    report["status"] = "certified" if val.ok else "validation-failed"
    return (EXIT_OK if val.ok else EXIT_ERROR), report


def cmd_cover(config: RunConfig) -> tuple[int, dict, str]:
    e = parse(config.expression)
    series = []
    last = None
    for n in range(config.oracle_depth + 1):
        last = depth_cover(e, n, config.box, config.workers)
        series.append({"depth": n, "measure": last.measure, "parts": len(last.cover),
                       "squares_visited": last.squares_visited})
    report = {"schema": SCHEMA_VERSION, "expression": to_text(e), "region": list(config.region),
              "series": series, "final": last.to_dict()}
    return EXIT_OK, report, last.to_csv()


def cmd_reproduce(name: str, workers: int = 1) -> tuple[int, list[str], dict]:
    checks = run_suite(name, workers)
    lines = [c.line() for c in checks]
    ok = all(c.passed for c in checks)
    lines.append(f"{name}: {sum(c.passed for c in checks)}/{len(checks)} passed")
    summary = {"schema": SCHEMA_VERSION, "suite": name, "passed": ok,
               "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]}
    return (EXIT_OK if ok else EXIT_ERROR), lines, summary


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational p/q: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cantorcert", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--expr", required=True, help="f(x, y), e.g. 'sin(x)*cos(y)'")
        sp.add_argument("--region", nargs=4, type=float, metavar=("X0", "X1", "Y0", "Y1"),
                        default=[0.0, 1.0, 0.0, 1.0])
        sp.add_argument("--max-rank", type=int, default=12)
        sp.add_argument("--budget", type=int, default=100_000)
        sp.add_argument("--oracle-depth", "--depth", dest="oracle_depth", type=int, default=10)
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--out", help="write the report here instead of stdout")

    c = sub.add_parser("certify", help="search for a certified interval inside f(C x C)")
    common(c)
    c.add_argument("--seed", nargs=2, type=_rational, metavar=("X0", "Y0"),
                   help="witness point as exact rationals p/q, both in C")
    v = sub.add_parser("cover", help="outer covers of f(C x C) and their measures")
    common(v)
    r = sub.add_parser("reproduce", help="run a canned reproduction suite")
    r.add_argument("name", choices=SUITES)
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--out", help="also write a JSON summary here")
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args) -> RunConfig:
    return RunConfig(
        expression=args.expr,
        region=tuple(args.region),
        max_rank=args.max_rank,
        budget=args.budget,
        oracle_depth=args.oracle_depth,
        seed_point=tuple(args.seed) if getattr(args, "seed", None) else None,
        output_format=args.format,
        workers=args.workers,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    try:
        if args.command == "reproduce":
            code, lines, summary = cmd_reproduce(args.name, args.workers)
            print("\n".join(lines))
            if args.out:
                _emit(dumps(summary), args.out)
        elif args.command == "certify":
            cfg = _config(args)
            code, report = cmd_certify(cfg)
            if cfg.output_format == "csv":
                img = report.get("certificate", {}).get("image")
                _emit("lo,hi\n" + (f"{img['lo']!r},{img['hi']!r}\n" if img else ""), args.out)
            else:
                _emit(dumps(report), args.out)
        else:
            cfg = _config(args)
            code, report, csv_text = cmd_cover(cfg)
            _emit(csv_text if cfg.output_format == "csv" else dumps(report), args.out)
    except ParseError as exc:
        print(f"error: parse error: {exc.message} at offset {exc.offset}", file=sys.stderr)
        return EXIT_ERROR
    except (CantorCertError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    log.info("finished in %.2fs", time.perf_counter() - start)
    return code


if __name__ == "__main__":
    sys.exit(main())
