"""Write the three figure data sets (rate regions and side-distortion tradeoff) as CSV."""
import argparse
import sys

from robustdsc.cli import run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figures")
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--d3", type=float, default=0.4)
    ap.add_argument("--rate", type=float, default=0.5)
    args = ap.parse_args()
    common = ["--samples", str(args.samples), "--out", args.out]
    for name, extra in (("fig2", ["--d3", str(args.d3)]), ("fig3", ["--d3", str(args.d3)]),
                        ("fig4", ["--rate", str(args.rate)])):
        code = run(["figure", name, *extra, *common])
        if code:
            sys.exit(code)
        print(f"wrote {args.out}/{name}.csv")


if __name__ == "__main__":
    main()
