"""Hankel block of a measure and the two faces of the operator at a few points."""

import argparse

import numpy as np

from genhilbert.measures import from_json
from genhilbert.operators import HankelEntrySpec, apply_H, apply_I
from genhilbert.series import make_family


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--measure-json", default='{"kind": "density", "p": 0}')
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--size", type=int, default=6)
    ap.add_argument("--family", default="constant_one")
    ap.add_argument("--param", type=float, default=0.5)
    ap.add_argument("--beta", type=float, default=None)
    args = ap.parse_args()

    mu = from_json(args.measure_json)
    spec = HankelEntrySpec(mu, args.alpha)
    np.set_printoptions(precision=6, suppress=True, linewidth=120)
    print(spec.matrix(args.size - 1, args.size - 1))

    f = make_family(args.family, args.param, args.beta)
    app = apply_H(spec, f, 4096)
    z = np.array([0.0, 0.5, -0.5, 0.5j, 0.9, 0.6 + 0.6j])
    h, i = app.evaluate(z), apply_I(mu, args.alpha, f, z)
    print(f"truncation {app.truncation}, residual bound {app.residual_bound:.2e}")
    for w, a, b in zip(z, h, i):
        print(f"z={w:.2f}  H={a:.12f}  I={b:.12f}  gap={abs(a - b):.1e}")


if __name__ == "__main__":
    main()
