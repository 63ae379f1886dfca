"""Monte Carlo check of the stationary and public-signal equilibria.

Prints simulated means with z-scores against the closed-form payoffs.
"""

import argparse

from persuaded_search import dist as D
from persuaded_search import models as M
from persuaded_search.equilibrium import equilibrium_passfail
from persuaded_search.public import PublicSignalModel, solve_public_equilibrium
from persuaded_search.search import Environment
from persuaded_search.sim import simulate_public, simulate_stationary


def line(name, rep, U, V):
    za = (rep.agent_mean - U) / rep.agent_se
    zp = (rep.principal_mean - V) / rep.principal_se
    print(f"{name:16s} agent {rep.agent_mean:.5f} (U={U:.5f}, z={za:+.2f})  "
          f"principal {rep.principal_mean:.6f} (V={V:.6f}, z={zp:+.2f})")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-n", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=20240601)
    args = ap.parse_args()
    env = Environment(D.uniform(0, 1), 2 / 3)
    eq = equilibrium_passfail(env)
    line("stationary", simulate_stationary(env, eq, args.n, args.seed), eq.U, eq.V)
    for name, lit in (("half_split", M.half_split()), ("reveal_interval", M.reveal_interval())):
        m = PublicSignalModel.from_literal(lit)
        p = solve_public_equilibrium(env, m)
        line(name, simulate_public(env, m, p, args.n, args.seed), p.U, p.V)


if __name__ == "__main__":
    main()
