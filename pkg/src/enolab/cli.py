"""``eno-lab`` command line entry point.

Exit status: 0 when every asserted property passes, 1 when a violation is
found, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import sys

from enolab.errors import EnoLabError
from enolab.experiments import EXPERIMENTS, FUNCTIONS, PROPERTIES, parse_config, run_experiment
from enolab.fvm import FLUXES, INTEGRATORS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="eno-lab",
        description="ENO reconstruction experiments: stability checks, convergence studies and solver runs.",
    )
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", metavar="FILE", help="key=value file; flags override its entries")
    p.add_argument("--k", type=int, help="reconstruction order")
    p.add_argument("--n", type=int, help="number of cells")
    p.add_argument("--eps", type=float, help="perturbation size of the worst-case family")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--out", metavar="DIR", help="output directory (default $ENO_LAB_OUT/<experiment>)")
    p.add_argument("--flux", choices=FLUXES)
    p.add_argument("--integrator", choices=INTEGRATORS)
    p.add_argument("--cfl", type=float)
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--func", choices=tuple(FUNCTIONS), help="test function for reconstruct/convergence/eno-tv")
    p.add_argument("--property", choices=PROPERTIES + ("all",), help="property checked by verify")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    overrides = {k: v for k, v in vars(args).items() if k != "config"}
    try:
        spec = parse_config(args.config, overrides)
        result = run_experiment(spec)
    except (EnoLabError, OSError) as exc:
        print(f"eno-lab: error: {exc}", file=sys.stderr)
        return 2
    for rep in result.reports:
        print(rep)
    print(f"outputs in {result.out_dir}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
