#!/usr/bin/env python3
"""Least-squares fits of coherent-basis wave-function precision at j=40.

Two relations for gamma=0.5 in resonance:
  * -log10(dP) vs N_max for the ground state over N_max = 2..20
    (precision gains a fixed number of digits per added layer);
  * -log10(dP) vs log10(dE) across the excited states whose energies are
    converged below 1e-4 at N_max=20 (the two convergence criteria track
    each other with a slope near -1.1).
"""

import argparse
import json
import sys
from pathlib import Path

from dicke.cli import main as dicke_main


def print_fit(path: Path) -> None:
    for line in path.read_text().splitlines():
        if line.startswith("# fit: "):
            fit = json.loads(line[len("# fit: "):])
            print(f"{path.name}: slope={fit['slope']:.4f} intercept={fit['intercept']:.4f} "
                  f"rms={fit['rms_residual']:.4f} n={fit['n_points']}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/fits", help="output directory")
    args = parser.parse_args()

    code = dicke_main([
        "fit", "--relation", "truncation", "--j", "40", "--gamma", "0.5",
        "--basis", "coherent", "--xmax-range", "2:20", "--out", args.out,
    ])
    if code != 0:
        return code
    code = dicke_main([
        "fit", "--relation", "energy", "--j", "40", "--gamma", "0.5",
        "--basis", "coherent", "--xmax", "20", "--out", args.out,
    ])
    if code != 0:
        return code

    print_fit(Path(args.out) / "fit_truncation_coherent.csv")
    print_fit(Path(args.out) / "fit_energy_coherent.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
