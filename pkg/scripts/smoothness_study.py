#!/usr/bin/env python3
"""Sample-smoothness diagnostics for both correlation models.

Emits derivative-estimate and Lipschitz-constant CSVs under
results/smoothness/ showing the contrast between the differentiable
(Gaussian-correlation) and rough (exponential-correlation) conductivity
samples as the probe step shrinks or the mode count grows.
"""

import argparse
import sys

from darcybench.cli import main as cli_main


def run(n_modes: int, seed: int) -> int:
    for correlation in ("gaussian", "exponential"):
        out = f"results/smoothness/{correlation}"
        for kind in ("derivative", "lipschitz"):
            args = ["diagnose", "--kind", kind, "--correlation", correlation,
                    "--sigma2", "0.1", "--n-modes", str(n_modes),
                    "--seed", str(seed), "--output-dir", out]
            print(f"== {correlation} {kind}")
            code = cli_main(args)
            if code != 0:
                return code
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-modes", type=int, default=1_000_000)
    parser.add_argument("--seed", type=int, default=20260810)
    opts = parser.parse_args()
    sys.exit(run(opts.n_modes, opts.seed))
