"""Certify each function in a list and tabulate square, image and oracle checks."""

import argparse
from fractions import Fraction

from cantorcert import differentiate, parse, point_condition, search
from cantorcert.reproduce import COROLLARY
from cantorcert.validate import validate


def seed_arg(text):
    x, y = text.split(",")
    return Fraction(x), Fraction(y)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("exprs", nargs="*", help="expressions; defaults to the built-in corollary list")
    ap.add_argument("--seed", type=seed_arg, help="p/q,p/q applied to every expression")
    ap.add_argument("--max-rank", type=int, default=12)
    ap.add_argument("--oracle-depth", type=int, default=10)
    args = ap.parse_args()

    items = [(t, args.seed) for t in args.exprs] or COROLLARY
    header = f"{'f':<16}{'seed ratio':>11}  {'rank':>4}  {'square':<18}{'image':<44}{'checks'}"
    print(header)
    print("-" * len(header))
    for text, seed in items:
        e = parse(text)
        g = differentiate(e)
        ratio = f"{point_condition(g, *seed).ratio:.4f}" if seed else "-"
        cert = search(g, max_rank=args.max_rank, seed=seed)
        if not cert:
            print(f"{text:<16}{ratio:>11}  {'-':>4}  no certificate after {cert.nodes_expanded} nodes")
            continue
        v = validate(cert, e, oracle_depth=args.oracle_depth)
        sq = "(%s, %s)" % cert.square.key
        img = f"[{cert.image.lo:.12f}, {cert.image.hi:.12f}]"
        checks = "ok" if v.ok else f"FAILED {v.to_dict()}"
        print(f"{text:<16}{ratio:>11}  {cert.rank:>4}  {sq:<18}{img:<44}{checks}")


if __name__ == "__main__":
    main()
