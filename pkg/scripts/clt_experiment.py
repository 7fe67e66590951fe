#!/usr/bin/env python3
"""Monte-Carlo check that N^(-1/2) sum_{n<=N} f(P(n)) looks complex Gaussian.

Draws R replicates, prints moment statistics against the targets
(Var Re = Var Im = 1/2, Cov = 0, E|X|^2 = 1, E|X|^4 -> 2), and compares
the empirical fourth moment with the exact multiplicative-energy count
E(P([N])) / N^2 supplied by the exact counting module.

Example:
    python scripts/clt_experiment.py --poly "x^2+1" --n 1000 --reps 20000 --seed 7
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from polyrmf.clt_audit import mcleish_audit, run_clt
from polyrmf.energy import ProgressionRange, energy
from polyrmf.polynomial import parse_polynomial
from polyrmf.sieve import factor_values


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--poly", default="x^2+1")
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--reps", type=int, default=20000)
    ap.add_argument("--seed", type=lambda s: int(s, 0), default=7)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--audit-grid", default=None,
                    help="optional comma list of N for the exact "
                         "martingale-condition audit")
    args = ap.parse_args()

    poly = parse_polynomial(args.poly)
    run = run_clt(poly, args.n, args.reps, args.seed, threads=args.threads)
    st = run.stats
    print(f"P = {poly}, N = {args.n}, R = {args.reps}, seed = {args.seed}")
    print(f"mean      = {st.mean_re:+.5f} {st.mean_im:+.5f}i")
    print(f"Var(Re)   = {st.var_re:.5f}   (target 0.5)")
    print(f"Var(Im)   = {st.var_im:.5f}   (target 0.5)")
    print(f"Cov       = {st.cov_re_im:+.5f}  (target 0)")
    print(f"E|X|^2    = {st.abs2_mean:.5f} +- {st.abs2_se:.5f} "
          f"(exact {float(st.exact_second_moment):.5f})")
    exact4 = energy(poly, ProgressionRange(args.n)).total / args.n**2
    print(f"E|X|^4    = {st.abs4_mean:.5f} +- {st.abs4_se:.5f} "
          f"(exact {exact4:.5f})")
    print(f"KS(Re)    = {st.ks_re:.5f}   KS(Im) = {st.ks_im:.5f}")

    if args.audit_grid:
        grid = [int(tok) for tok in args.audit_grid.split(",")]
        table = factor_values(poly, max(grid))
        audit = mcleish_audit(poly, table, grid)
        print("\nexact martingale-condition sums:")
        for sc in audit.scales:
            print(f"  N={sc.N:>6}  variance={float(sc.variance_sum):.6f}  "
                  f"lindeberg={float(sc.lindeberg_sum):.6f}  "
                  f"cross={float(sc.cross_term):.6f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
