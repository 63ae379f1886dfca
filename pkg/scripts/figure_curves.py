"""Incremental-benefit curves and the fixed-point line for several discount factors.

For each delta writes c_F, c_G* (pass/fail at r_bar), c_G0 and the line
(1-delta)/delta * x; their crossings with the line are r_bar, r_bar and r_lo.
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
    ap.add_argument("--deltas", default="0.5,0.6666666666666666,0.9")
    ap.add_argument("--points", type=int, default=512)
    args = ap.parse_args()
    f = D.uniform(0, 1)
    g0 = D.uninformative(f)
    xs = np.linspace(f.lo, f.hi, args.points)
    os.makedirs(args.out, exist_ok=True)
    for d in (float(s) for s in args.deltas.split(",")):
        eq = equilibrium_passfail(Environment(f, d))
        line = (1 - d) / d * xs
        path = os.path.join(args.out, f"curves_delta_{d:.4f}.csv")
        write_table(path, ["x", "c_F", "c_Gstar", "c_G0", "line"],
                    zip(xs, f.expected_excess(xs), eq.dist.expected_excess(xs),
                        g0.expected_excess(xs), line))
        bm = eq.benchmarks
        print(f"delta={d:.4f}: r_lo={bm.r_lo:.6f} r_bar={bm.r_bar:.6f} p={eq.price:.6f} -> {path}")


if __name__ == "__main__":
    main()
