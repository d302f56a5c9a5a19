"""Tail proxy log(e/(1-a)) mu([a,1)) / (1-a)^2 for (1-t) log(e/(1-t))^q dt.

q = -1 sits exactly on the logarithmic boundary (the proxy levels off);
more negative q sends it to 0.
"""

import argparse

from genhilbert.harness import compactness_proxy, run_compactness_proxy
from genhilbert.measures import density


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qs", type=float, nargs="+", default=[0.0, -0.5, -1.0, -1.5, -2.0, -3.0])
    ap.add_argument("--table", action="store_true", help="print the proxy at every probe")
    args = ap.parse_args()

    for q in args.qs:
        mu = density(1.0, q)
        rep = run_compactness_proxy("T2.2", mu, 2.0)
        s = rep.signals
        print(f"q={q:g}: proxy {s['proxy_first']:.4g} -> {s['proxy_last']:.4g}, "
              f"verdict {rep.verdict}, consistent {rep.consistent}")
        if args.table:
            d, proxy = compactness_proxy("T2.2", mu)
            for x, v in zip(d, proxy):
                print(f"  1-a={x:.3e}  {v:.6g}")


if __name__ == "__main__":
    main()
