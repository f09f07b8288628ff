#!/usr/bin/env python3
"""Reproduce the manufactured-solution error tables for all solvers.

Writes one errors.csv per solver under results/verify/<solver>/.  The full
(sigma2, N) sweep at production resolution takes a while for the 2D solvers;
pass --quick for a reduced sweep on coarser grids.
"""

import argparse
import sys

from darcybench.cli import main as cli_main

FULL = {
    "fdm1d": ["--dx", "1e-3", "--length", "200"],
    "fem1d": ["--dx", "1e-3", "--length", "200"],
    "csm1d": ["--length", "200"],
    "fdm2d": ["--dx", "2e-2", "--lx", "20", "--ly", "10"],
    "fem2d": ["--dx", "2e-2", "--lx", "20", "--ly", "10"],
}

QUICK = {
    "fdm1d": ["--dx", "1e-2", "--length", "20"],
    "fem1d": ["--dx", "1e-2", "--length", "20"],
    "csm1d": ["--length", "200"],
    "fdm2d": ["--dx", "1e-1", "--lx", "20", "--ly", "10"],
    "fem2d": ["--dx", "1e-1", "--lx", "20", "--ly", "10"],
}


def run(quick: bool, seed: int) -> int:
    grids = QUICK if quick else FULL
    sigma2 = ["0.1", "1", "2", "4", "6", "8", "10"]
    n_modes = ["100", "1000"] + ([] if quick else ["10000"])
    for correlation in ("gaussian", "exponential"):
        for solver, grid_args in grids.items():
            out = f"results/verify/{correlation}/{solver}"
            args = ["verify", "--solver", solver, "--correlation", correlation,
                    "--seed", str(seed), "--sigma2-list", *sigma2,
                    "--n-modes-list", *n_modes, "--output-dir", out, *grid_args]
            print(f"== {correlation} {solver}")
            code = cli_main(args)
            if code != 0:
                return code
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true")
    parser.add_argument("--seed", type=int, default=20260810)
    opts = parser.parse_args()
    sys.exit(run(opts.quick, opts.seed))
