#!/usr/bin/env python3
"""Scan the off-diagonal multiplicative energy of P([N]) across a grid of N.

Writes one CSV row per grid point (N, total, diagonal, offdiag,
offdiag/N^exponent) and prints the fitted log-log slope.  The diagonal
2M^2 - M grows like 2N^2; the interesting signal is how slowly the
off-diagonal remainder grows next to it.

Example:
    python scripts/energy_scan.py --poly "x^2+1" --grid 250,500,1000,2000 \
        --out energy_scan.csv
"""

import argparse
import csv
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from polyrmf.energy import ProgressionRange, energy, error_exponent, exponent_fit
from polyrmf.polynomial import parse_polynomial


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--poly", default="x^2+1")
    ap.add_argument("--grid", default="250,500,1000,2000")
    ap.add_argument("--q", type=int, default=1)
    ap.add_argument("--a", type=int, default=0)
    ap.add_argument("--chunked", action="store_true")
    ap.add_argument("--out", default="energy_scan.csv")
    args = ap.parse_args()

    poly = parse_polynomial(args.poly)
    grid = [int(tok) for tok in args.grid.split(",")]
    expo = error_exponent(poly.degree)
    print(f"P = {poly}, degree {poly.degree}, error exponent {expo}")

    rows = []
    for n in grid:
        rep = energy(poly, ProgressionRange(n, args.q, args.a),
                     chunked=args.chunked)
        offdiag = rep.total - rep.diagonal_arg
        rows.append((n, rep.total, rep.diagonal_arg, offdiag,
                     rep.offdiag_over_bound))
        print(f"N={n:>8}  total={rep.total:>16}  offdiag={offdiag:>10}  "
              f"offdiag/N^{expo}={rep.offdiag_over_bound:.6f}")

    fit = exponent_fit(poly, grid, q=args.q, a=args.a, chunked=args.chunked)
    print(f"log-log slope of offdiag vs N: {fit.slope:.4f}")

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "total", "diagonal", "offdiag", "normalized"])
        w.writerows(rows)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
