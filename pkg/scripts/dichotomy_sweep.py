"""Sweep (1 - t)^(gamma - 1) dt across the 2-Carleson boundary.

Prints the fitted growth exponent of the lower-bound functional, the image
signal and the harness verdict for each gamma.
"""

import argparse

import numpy as np

from genhilbert.harness import run_boundedness_harness
from genhilbert.measures import density


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--theorem", default="T2.1")
    ap.add_argument("--alpha", type=float, default=2.0)
    ap.add_argument("--beta", type=float, default=0.5)
    ap.add_argument("--gammas", type=float, nargs="+",
                    default=list(np.round(np.arange(1.0, 3.01, 0.1), 2)))
    args = ap.parse_args()

    print("gamma,functional_exponent,image_exponent,verdict,consistent")
    for g in args.gammas:
        rep = run_boundedness_harness(args.theorem, density(g - 1.0), args.alpha, args.beta)
        s = rep.signals
        print(f"{g:g},{s['functional_raw_exponent']:.5f},{s['image_growth_exponent']:.5f},"
              f"{rep.verdict},{rep.consistent}")


if __name__ == "__main__":
    main()
