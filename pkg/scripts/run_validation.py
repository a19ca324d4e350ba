"""Monte Carlo cross-check of the closed forms over a few problem instances."""
import argparse

from robustdsc.gaussian_core import GaussianProblem, TestChannelParams
from robustdsc.oracle_mc import DEFAULT_PARAMS, validate

CASES = [
    (GaussianProblem(1.0, 1.0, 1.0), DEFAULT_PARAMS),
    (GaussianProblem(2.0, 0.3, 1.5), TestChannelParams(1.0, 0.2, 2.0, 0.6)),
    (GaussianProblem(0.5, 2.0, 0.1), TestChannelParams(4.0, 4.0, 0.3, 0.05)),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    bad = 0
    for prob, params in CASES:
        rep = validate(prob, params, args.n, args.seed)
        print(f"sigma_x2={prob.sigma_x2} n1={prob.sigma_n1_2} n2={prob.sigma_n2_2} {params}")
        for r in rep.records:
            if r.analytic is None:
                print(f"  {r.quantity:<14} n/a")
                continue
            z = (r.sampled - r.closed_form) / r.se
            print(f"  {r.quantity:<14} closed={r.closed_form:.6f} sampled={r.sampled:.6f} z={z:+.2f} {r.status()}")
        bad += len(rep.failures)
    print(f"{bad} failures")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
