"""Locate the smallest central distortion admitted by the outer bound at equal rates.

For each rate R the outer-bound membership of (R, R, s, s, D3) is bisected in
D3 and compared with the sum-rate distortion function D3*(2R); with loose
side distortions the two should coincide.
"""
import argparse

from robustdsc.gaussian_core import GaussianProblem, RdPoint, d3_star_sumrate, derived_constants
from robustdsc.gaussian_regions import qout_contains


def threshold(prob, R, iters=40):
    lo, hi = derived_constants(prob).d3_min, prob.sigma_x2
    s = prob.sigma_x2
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if qout_contains(prob, RdPoint(R, R, s, s, mid)).contains:
            hi = mid
        else:
            lo = mid
    return hi


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma-x2", type=float, default=1.0)
    ap.add_argument("--sigma-n2", type=float, default=1.0, help="common noise variance")
    ap.add_argument("--rates", default="0.1,0.25,0.5,1,2")
    args = ap.parse_args()
    prob = GaussianProblem(args.sigma_x2, args.sigma_n2, args.sigma_n2)
    print(f"{'R':>6} {'threshold':>12} {'D3*(2R)':>12} {'diff':>10}")
    for R in map(float, args.rates.split(",")):
        t, ref = threshold(prob, R), d3_star_sumrate(prob, 2 * R)
        print(f"{R:6.3f} {t:12.7f} {ref:12.7f} {t - ref:10.2e}")


if __name__ == "__main__":
    main()
