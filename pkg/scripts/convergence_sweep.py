"""Zeno-product convergence on seeded random instances, written as plot-ready CSV.

    python3 scripts/convergence_sweep.py --instances 20 --out convergence.csv
"""
import argparse
import csv
from dataclasses import dataclass

from zenolab.engine import convergence_sweep, make_instance, subspace_frames, zeno_limit
from zenolab.rng import SplitMix64, random_density, random_projection
from zenolab.standard_form import build_standard_form


@dataclass(frozen=True)
class SweepSettings:
    instances: int = 20
    max_dim: int = 6
    seed: int = 20240917
    ts: tuple = (0.25, 0.5, 1.0, 2.0, 3.0)
    ns: tuple = tuple(2 ** j for j in range(1, 13))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--instances", type=int, default=SweepSettings.instances)
    parser.add_argument("--max-dim", type=int, default=SweepSettings.max_dim)
    parser.add_argument("--seed", type=int, default=SweepSettings.seed)
    parser.add_argument("--out", default="convergence.csv")
    args = parser.parse_args()
    cfg = SweepSettings(args.instances, args.max_dim, args.seed)

    rng = SplitMix64(cfg.seed)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["instance", "d", "k", "commutator", "t", "n", "defect", "slope"])
        for i in range(cfg.instances):
            d = rng.integer(2, cfg.max_dim)
            k = rng.integer(1, d - 1)
            inst = make_instance(build_standard_form(d, random_density(rng, d)), random_projection(rng, d, k))
            zl, frame = zeno_limit(inst), subspace_frames(inst).eh
            for t in cfg.ts:
                rec = convergence_sweep(inst, t, cfg.ns, zl, frame)
                for n, defect in zip(rec.ns, rec.defects):
                    w.writerow([i, d, k, repr(inst.commutator_norm), t, n, repr(defect), rec.slope])
                slope = "exact" if rec.slope is None else f"{rec.slope:+.3f}"
                print(f"instance {i:2d} d={d} k={k} t={t:<4} slope={slope}")


if __name__ == "__main__":
    main()
