"""Measured norms of the Zeno products across the strip -1/2 <= Im z <= 0.

Compares each norm with the guaranteed bound r**(-Im z) and with the unit bound.
The default instance is the identity projection on diag(1/2, 1/3, 1/6), where
the unit bound fails at z = -i/2.

    python3 scripts/strip_scan.py --probs 0.5 0.3333333333333333 0.16666666666666669 --pattern 1 1 0
"""
import argparse
import csv
import sys

import numpy as np

from zenolab.engine import contraction_scan, make_instance
from zenolab.standard_form import build_standard_form


def main():
    parser = argparse.ArgumentParser(description="strip scan of ||F_n(z)||")
    parser.add_argument("--probs", type=float, nargs="+", default=[1 / 2, 1 / 3, 1 / 6])
    parser.add_argument("--pattern", type=int, nargs="+", default=None, help="diagonal 0/1 projection")
    parser.add_argument("--n", type=int, nargs="+", default=[1, 4, 32])
    parser.add_argument("--re", type=float, nargs="+", default=[-2.0, -1.0, 0.0, 1.0, 2.0])
    parser.add_argument("--steps", type=int, default=9, help="points along Im z")
    args = parser.parse_args()

    p = np.array(args.probs) / sum(args.probs)
    pattern = args.pattern or [1] * len(p)
    inst = make_instance(build_standard_form(len(p), np.diag(p)), np.diag(pattern).astype(complex))
    grid = [complex(x, -y) for y in np.linspace(0, 0.5, args.steps) for x in args.re]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "re", "im", "norm", "strip_bound", "unit_bound_holds"])
    for n in args.n:
        for z, pt in contraction_scan(inst, n, grid).items():
            w.writerow([n, z.real, z.imag, repr(pt.norm), repr(pt.strip_bound), pt.norm <= 1 + 1e-10])


if __name__ == "__main__":
    main()
