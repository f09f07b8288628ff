#!/usr/bin/env python3
"""Monte Carlo validation against first-order perturbation theory.

Runs ensembles over a range of ln-K variances for one solver and prints the
measured velocity variances next to the linear-theory trend; summaries and
boundary-variance profiles land under results/mc/.
"""

import argparse
import sys

from darcybench.cli import main as cli_main


def run(solver: str, realizations: int, sigma2s, seed: int, workers: int) -> int:
    for s2 in sigma2s:
        out = f"results/mc/{solver}_s2_{s2:g}"
        args = ["mc", "--solver", solver, "--correlation", "gaussian",
                "--sigma2", str(s2), "--realizations", str(realizations),
                "--n-modes", "100", "--dx", "5e-2", "--lx", "20", "--ly", "10",
                "--margin-x", "4", "--margin-y", "2", "--seed", str(seed),
                "--workers", str(workers), "--output-dir", out]
        print(f"== sigma2 = {s2}")
        code = cli_main(args)
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--solver", default="fdm", choices=("fdm", "fem", "grw"))
    parser.add_argument("--realizations", type=int, default=100)
    parser.add_argument("--sigma2", type=float, nargs="+",
                        default=[0.1, 0.5, 1.0, 1.5, 2.0])
    parser.add_argument("--seed", type=int, default=20260810)
    parser.add_argument("--workers", type=int, default=1)
    opts = parser.parse_args()
    sys.exit(run(opts.solver, opts.realizations, opts.sigma2, opts.seed, opts.workers))
