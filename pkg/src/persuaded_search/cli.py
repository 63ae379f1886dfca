"""Command-line front end.

    persuaded-search <solve|verify|simulate|sweep|public> --config PATH
                     [--out DIR] [--contract PATH] [--deltas LIST]

Exit codes: 0 success, 1 usage or config error, 2 the model violates a
precondition of the theory (agent never searches, inconsistent public
signal), 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import dist as D
from .config import ConfigError, load_config, load_contract, public_model
from .equilibrium import Contract, ContractError, equilibrium_passfail, verify_stationary
from .public import ModelError, phi, solve_public_equilibrium
from .search import Environment, NeverSearchError, benchmarks
from .sim import simulate_public, simulate_stationary

EXIT_OK, EXIT_USAGE, EXIT_MODEL, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_table(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _outdir(args, cfg):
    out = args.out or cfg.output_dir
    os.makedirs(out, exist_ok=True)
    return out


def cmd_solve(args, cfg):
    env = cfg.environment
    eq = equilibrium_passfail(env)
    bm = eq.benchmarks
    out = _outdir(args, cfg)
    write_table(os.path.join(out, "equilibrium.csv"),
                ["U", "V", "p", "r_lo", "r_bar", "u_lo", "u_bar", "cutoff", "m1", "m2"],
                [[eq.U, eq.V, eq.price, bm.r_lo, bm.r_bar, bm.u_lo, bm.u_bar, eq.cutoff,
                  eq.m1, eq.m2]])
    f = env.prior
    xs = np.linspace(f.lo, f.hi, cfg.curve_points)
    g0 = D.uninformative(f)
    line = (1.0 - env.delta) / env.delta * xs
    write_table(os.path.join(out, "curves.csv"), ["x", "c_F", "c_Gstar", "c_G0", "line"],
                zip(xs, f.expected_excess(xs), eq.dist.expected_excess(xs),
                    g0.expected_excess(xs), line))
    print(f"U={fmt(eq.U)} V={fmt(eq.V)} p={fmt(eq.price)} r_lo={fmt(bm.r_lo)} "
          f"r_bar={fmt(bm.r_bar)}")
    return EXIT_OK


def build_contract(env, obj):
    """Contract from a validated contract literal."""
    f = env.prior
    bm = benchmarks(env)
    lit = obj["dist"]
    kind = lit["kind"]
    if kind in ("binary", "lower_censorship"):
        cut = lit["cutoff"]
        cut = {"r_bar": bm.r_bar, "r_lo": bm.r_lo}.get(cut, cut)
        g = (D.binary_split if kind == "binary" else D.lower_censorship)(f, float(cut))
    elif kind == "full_info":
        g = D.full_info(f)
    elif kind == "uninformative":
        g = D.uninformative(f)
    elif kind == "mixed":
        g = D.from_literal(lit, reference=f)
    else:
        g = D.as_pmdist(D.from_literal(lit))
        g = D.PmDist(f, g.knots, g.cvals, g.locs, g.masses)
    price = obj["price"]
    if price == "equilibrium":
        price = (bm.u_bar - bm.u_lo) * (1.0 - env.delta * f.cdf(bm.r_bar))
    return Contract(float(price), g)


def cmd_verify(args, cfg):
    if not args.contract:
        raise UsageError("verify needs --contract PATH")
    env = cfg.environment
    try:
        contract = build_contract(env, load_contract(args.contract))
    except (D.DistributionError, ValueError) as exc:
        if isinstance(exc, NeverSearchError):
            raise
        raise ConfigError(f"contract: {exc}") from exc
    rep = verify_stationary(env, contract, cfg.grid_size)
    print(rep.format())
    if args.out:
        out = _outdir(args, cfg)
        write_table(os.path.join(out, "verification.csv"),
                    ["condition", "passed", "residual", "tol"],
                    [[c.name, c.passed, c.residual, c.tol] for c in rep.checks])
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_simulate(args, cfg):
    env = cfg.environment
    model = public_model(cfg)
    if model is None:
        eq = equilibrium_passfail(env)
        rep = simulate_stationary(env, eq, cfg.n, cfg.seed, cfg.horizon)
    else:
        peq = solve_public_equilibrium(env, model)
        rep = simulate_public(env, model, peq, cfg.n, cfg.seed, cfg.horizon)
    out = _outdir(args, cfg)
    rep.write_csv(os.path.join(out, "simulation.csv"), fmt)
    rep.write_histogram_csv(os.path.join(out, "histogram.csv"))
    print(f"agent {fmt(rep.agent_mean)} +- {fmt(rep.agent_se)}; "
          f"principal {fmt(rep.principal_mean)} +- {fmt(rep.principal_se)}")
    return EXIT_OK


def parse_deltas(text):
    try:
        vals = [float(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --deltas list: {exc}") from exc
    if not vals:
        raise UsageError("--deltas is empty")
    for d in vals:
        if not 0.0 < d < 1.0:
            raise UsageError(f"discount factor {d!r} outside (0, 1)")
    return vals


def cmd_sweep(args, cfg):
    if not args.deltas:
        raise UsageError("sweep needs --deltas LIST")
    deltas = parse_deltas(args.deltas)
    prior = cfg.environment.prior
    rows = []
    for d in deltas:
        env = Environment(prior, d)
        try:
            eq = equilibrium_passfail(env)
        except NeverSearchError:
            rows.append([d, "nan", "nan", "nan", "nan", "nan", "never-search"])
            continue
        f_rb = prior.cdf(eq.cutoff)
        identity = eq.price / (1.0 - d * f_rb) - eq.V
        rows.append([d, eq.price, eq.V, eq.cutoff, f_rb, identity, "ok"])
    out = _outdir(args, cfg)
    write_table(os.path.join(out, "sweep.csv"),
                ["delta", "p", "V", "r_bar", "F_r_bar", "identity", "status"], rows)
    for r in rows:
        print(" ".join(fmt(v) for v in r))
    return EXIT_OK


def cmd_public(args, cfg):
    env = cfg.environment
    model = public_model(cfg)
    if model is None:
        raise ConfigError("config has no public_signal section")
    peq = solve_public_equilibrium(env, model)
    out = _outdir(args, cfg)
    write_table(os.path.join(out, "public_outcomes.csv"),
                ["label", "weight", "case", "xbar", "cutoff", "price", "psi"],
                [[p.label, p.weight, p.case, p.xbar, p.cutoff, p.price, p.psi]
                 for p in peq.per_outcome])
    write_table(os.path.join(out, "public_summary.csv"),
                ["r_xi", "k_star", "U", "V", "u_bar", "r_bar", "sg_residual"],
                [[peq.r_xi, peq.k_star, peq.U, peq.V, peq.u_bar, peq.r_bar, peq.sg_residual]])
    ks = np.linspace(0.0, peq.r_bar - peq.r_xi, cfg.phi_points)
    write_table(os.path.join(out, "phi.csv"), ["k", "phi"],
                [[k, phi(model, k, peq.r_xi, peq.r_bar, env.prior)] for k in ks])
    print(f"r_xi={fmt(peq.r_xi)} k*={fmt(peq.k_star)} U={fmt(peq.U)} V={fmt(peq.V)}")
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "public": cmd_public,
}


def build_parser():
    p = _Parser(prog="persuaded-search", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--contract")
    p.add_argument("--deltas")
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ContractError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NeverSearchError as exc:
        print(f"model error: {exc} (the agent never searches when theta_lo >= delta*E[theta])",
              file=sys.stderr)
        return EXIT_MODEL
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
