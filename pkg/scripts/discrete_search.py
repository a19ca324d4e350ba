"""Heuristic search on a binary copy source against the Blahut-Arimoto floor.

Both encoders see the same uniform bit; the smallest achievable sum rate with
a central Hamming distortion cap cannot beat ln 2 - h(D).
"""
import argparse
import math

import numpy as np

from robustdsc.discrete_inner import DiscreteProblem, theorem1_optimize


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--caps", default="0.05,0.11,0.2,0.3")
    ap.add_argument("--budget", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    pmf = np.zeros((2, 2, 2))
    pmf[0, 0, 0] = pmf[1, 1, 1] = 0.5
    prob = DiscreteProblem(pmf, 1 - np.eye(2))
    print(f"{'cap':>6} {'found':>9} {'floor':>9} {'D3':>7}")
    for cap in map(float, args.caps.split(",")):
        pt = theorem1_optimize(prob, (2, 2, 2, 2), (1, 1, 0, 0, 0), args.budget, args.seed,
                               constraints={"d3": cap})
        floor = math.log(2) + cap * math.log(cap) + (1 - cap) * math.log(1 - cap)
        print(f"{cap:6.3f} {pt.corner1.sum_rate:9.5f} {floor:9.5f} {pt.distortions[2]:7.4f}")


if __name__ == "__main__":
    main()
