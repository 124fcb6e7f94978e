"""Transverse Ising or Heisenberg chain: Gibbs state, region projection, Zeno generator.

Prints the commutator norm, the Pauli-range profile of h_E and the invariance
leakage of H_E, then runs the full verification suite.

    python3 scripts/spin_chain.py --sites 3 --beta 1.0 --region 1 2 --out-dir runs/chain
"""
import argparse
import json

from zenolab.config import parse_config_data
from zenolab.engine import leakage, make_instance, subspace_frames, zeno_limit
from zenolab.models import SpinChainSpec, build_spin_chain, gibbs_state, pauli_locality, region_projection
from zenolab.runner import verify_suite
from zenolab.standard_form import build_standard_form


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sites", type=int, default=3)
    parser.add_argument("--model", default="transverse-ising")
    parser.add_argument("--J", type=float, default=1.0)
    parser.add_argument("--g", type=float, default=1.0)
    parser.add_argument("--beta", type=float, default=1.0)
    parser.add_argument("--region", type=int, nargs="+", default=[1, 2])
    parser.add_argument("--out-dir", default="runs/chain")
    parser.add_argument("--skip-suite", action="store_true")
    args = parser.parse_args()

    spec = SpinChainSpec(args.sites, args.model, args.J, args.g)
    rho = gibbs_state(build_spin_chain(spec), args.beta)
    inst = make_instance(build_standard_form(spec.dim, rho), region_projection(args.sites, args.region))
    zl, frames = zeno_limit(inst), subspace_frames(inst)
    print(f"d={inst.dim} k={inst.k} r={inst.sf.ratio:.4g} ||[E, rho]||={inst.commutator_norm:.3e}")
    if args.sites <= 6:
        for span, weight in pauli_locality(zl.h_E, args.sites).items():
            print(f"  h_E Pauli weight at range {span}: {weight:.6f}")
    for t in (0.5, 1.0, 2.0):
        print(f"  H_E leakage at t={t}: {leakage(frames, zl.w(t)):.3e}")
    if args.skip_suite:
        return
    cfg = parse_config_data({
        "instance": {
            "id": f"{args.model}-{args.sites}",
            "dim": spec.dim,
            "state": {"gibbs": {"model": {"n_sites": args.sites, "model": args.model, "J": args.J, "g": args.g},
                                "beta": args.beta}},
            "projection": {"region": {"sites": args.region}},
        },
    })
    code = verify_suite(cfg, args.out_dir)
    report = json.load(open(f"{args.out_dir}/report.json"))
    for name, check in report["checks"].items():
        print(f"  {name:<12} {check['status']}")
    print(f"exit {code}")


if __name__ == "__main__":
    main()
