"""Measures of the depth-n outer covers of C*C, against the 17/21 floor.

    python scripts/product_measure_series.py --depth 12 --workers 4
"""

import argparse
import time

from cantorcert import depth_cover, parse

FLOOR, CEIL = 17 / 21, 8 / 9


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--expr", default="x*y")
    ap.add_argument("--depth", type=int, default=10)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    e = parse(args.expr)
    print("n,measure,parts,squares,seconds")
    for n in range(args.depth + 1):
        t = time.perf_counter()
        r = depth_cover(e, n, workers=args.workers, budget=4 ** args.depth + 1)
        print(f"{n},{r.measure!r},{len(r.cover)},{r.squares_visited},{time.perf_counter() - t:.3f}")
    if args.expr == "x*y":
        print(f"# floor 17/21 = {FLOOR!r}, ceiling 8/9 = {CEIL!r}")


if __name__ == "__main__":
    main()
