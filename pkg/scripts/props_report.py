"""Run the flow-property checks on the saturating arctan test system."""

import argparse

import numpy as np

from semiflow import EvolutionSystem, InputOperator, DiagonalSemigroup
from semiflow.flow_props import (
    check_axioms,
    check_brs,
    check_cep,
    deviation_suite,
    format_reports,
)
from semiflow.nonlinearities import arctan_saturation


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.strip())
    ap.add_argument("--modes", type=int, default=12)
    ap.add_argument("--gain", type=float, default=0.5)
    ap.add_argument("--input-gain", type=float, default=0.4)
    ap.add_argument("--tau", type=float, default=0.5)
    ap.add_argument("--pairs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    sg = DiagonalSemigroup(mu=-np.arange(1.0, args.modes + 1.0) ** 2,
                           omega=1.0, analytic=True)
    f = arctan_saturation(args.modes, gain=args.gain, input_gain=args.input_gain)
    sys_ = EvolutionSystem(sg, f, B=InputOperator.identity(args.modes))

    reports = [
        check_axioms(sys_, t_end=args.tau, n_samples=5, seed=args.seed),
        deviation_suite(sys_, tau=args.tau, n_pairs=args.pairs, seed=args.seed),
        check_cep(sys_, eps_grid=[0.5, 0.25], h_grid=[0.5, 1.0],
                  n_samples=4, seed=args.seed),
        check_brs(sys_, C=0.8, tau=args.tau, n_samples=args.pairs,
                  seed=args.seed),
    ]
    print(format_reports(reports), end="")
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    raise SystemExit(main())
