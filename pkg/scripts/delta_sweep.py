"""Equilibrium price and principal value across discount factors.

Writes delta, p, V, r_bar, F(r_bar), the duration identity residual and
p/sqrt(1-delta) (for the uniform prior p shrinks like sqrt(1-delta)).
"""

import argparse
import os

import numpy as np

from persuaded_search import dist as D
from persuaded_search.cli import write_table
from persuaded_search.equilibrium import equilibrium_passfail
from persuaded_search.search import Environment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--points", type=int, default=40)
    ap.add_argument("--slope", type=float, default=0.0,
                    help="density slope of the prior on [0, 1] (0 = uniform)")
    args = ap.parse_args()
    prior = D.uniform(0, 1) if args.slope == 0 else D.linear_density(0, 1, args.slope)
    deltas = 1.0 - np.logspace(np.log10(0.5), -4, args.points)
    rows = []
    for d in deltas:
        eq = equilibrium_passfail(Environment(prior, float(d)))
        f_rb = prior.cdf(eq.cutoff)
        rows.append([d, eq.price, eq.V, eq.cutoff, f_rb,
                     eq.price / (1 - d * f_rb) - eq.V, eq.price / np.sqrt(1 - d)])
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "delta_sweep.csv")
    write_table(path, ["delta", "p", "V", "r_bar", "F_r_bar", "identity", "p_over_sqrt_gap"], rows)
    print(f"wrote {path}")
    for r in rows[:: max(1, len(rows) // 8)]:
        print(f"delta={r[0]:.6f}  p={r[1]:.6f}  V={r[2]:.6f}  p/sqrt(1-delta)={r[6]:.4f}")


if __name__ == "__main__":
    main()
