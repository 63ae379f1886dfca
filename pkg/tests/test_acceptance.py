"""Acceptance criteria, one test per criterion.

Each test prints a single ``[acceptance] <n> PASS|FAIL`` line with its
sub-checks and runtime.  Run directly (``python3 tests/test_acceptance.py``)
for the summary lines alone.
"""

import contextlib
import io
import json
import math
import os
import sys
import tempfile
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from helpers import random_env, random_partition  # noqa: E402
from persuaded_search import dist as D  # noqa: E402
from persuaded_search import models as M  # noqa: E402
from persuaded_search.cli import EXIT_VERIFY, main as cli_main  # noqa: E402
from persuaded_search.equilibrium import (  # noqa: E402
    best_binary_cutoff,
    equilibrium_lower_censorship,
    equilibrium_passfail,
    verify_stationary,
)
from persuaded_search.public import (  # noqa: E402
    PublicSignalModel,
    cutoff_search_psi,
    phi,
    solve_public_equilibrium,
)
from persuaded_search.search import (  # noqa: E402
    Environment,
    benchmarks,
    reservation_value,
    value_iteration_oracle,
)
from persuaded_search.sim import simulate_stationary  # noqa: E402

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DELTA = 2.0 / 3.0
R_BAR = (3 - math.sqrt(5)) / 2          # root of r = (1 - r)^2 in (0, 1)
U_BAR = R_BAR / DELTA
V_UNIF = 3 * (3 - math.sqrt(5)) / 4 - 0.5
K_REVEAL = (R_BAR - 0.35) ** 2 / 2.3
SEED = 20240601


def uniform_env(delta=DELTA):
    return Environment(D.uniform(0.0, 1.0), delta)


class Criterion:
    """Collects sub-checks and reports one line."""

    def __init__(self, number, title, time_limit=None):
        self.number, self.title, self.time_limit = number, title, time_limit
        self.checks = []
        self.t0 = time.perf_counter()

    def check(self, label, ok, detail=""):
        self.checks.append((label, bool(ok), detail))

    def finish(self):
        elapsed = time.perf_counter() - self.t0
        if self.time_limit is not None:
            self.check("runtime", elapsed < self.time_limit,
                       f"{elapsed:.2f}s < {self.time_limit:g}s")
        ok = all(c[1] for c in self.checks)
        failed = [f"{lbl} ({det})" for lbl, good, det in self.checks if not good]
        line = (f"[acceptance] {self.number} {'PASS' if ok else 'FAIL'} {self.title}: "
                f"{len(self.checks) - len(failed)}/{len(self.checks)} checks, {elapsed:.2f}s")
        if failed:
            line += " | failed: " + "; ".join(failed)
        return ok, line


def report(crit, capsys=None):
    ok, line = crit.finish()
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    assert ok, line


def criterion_1():
    c = Criterion(1, "uniform closed-form regression", time_limit=1.0)
    env = uniform_env()
    eq = equilibrium_passfail(env)
    bm = eq.benchmarks
    c.check("r_bar", abs(bm.r_bar - R_BAR) <= 1e-9, f"{bm.r_bar!r}")
    c.check("r_lo", abs(bm.r_lo - 1 / 3) <= 1e-12, f"{bm.r_lo!r}")
    c.check("U", abs(eq.U - 0.5) <= 1e-9, f"{eq.U!r}")
    c.check("V", abs(eq.V - V_UNIF) <= 1e-9, f"{eq.V!r}")
    c.check("p", abs(eq.price - 0.0543734) <= 1e-6, f"{eq.price!r}")
    c.check("p closed form", abs(eq.price - V_UNIF * (1 - DELTA * R_BAR)) <= 1e-9)
    return c


def criterion_2():
    c = Criterion(2, "tangency and reservation equality on random priors", time_limit=5.0)
    rng = np.random.default_rng(SEED)
    worst_t = worst_r = 0.0
    order_ok = True
    for _ in range(25):
        env = random_env(rng)
        eq = equilibrium_passfail(env)
        bm = eq.benchmarks
        worst_t = max(worst_t, abs(eq.dist.expected_excess(bm.r_bar)
                                   - env.prior.expected_excess(bm.r_bar)))
        worst_r = max(worst_r, abs(reservation_value(env, eq.dist).r - bm.r_bar))
        order_ok &= eq.m1 < bm.r_lo < bm.r_bar < eq.m2
    c.check("tangency", worst_t <= 1e-9, f"max {worst_t:.2e}")
    c.check("r(G*) = r_bar", worst_r <= 1e-8, f"max {worst_r:.2e}")
    c.check("m1 < r_lo < r_bar < m2", order_ok)
    return c


def criterion_3():
    c = Criterion(3, "binary-cutoff oracle", time_limit=10.0)
    rng = np.random.default_rng(SEED + 3)
    envs = [uniform_env()] + [random_env(rng) for _ in range(5)]
    for i, env in enumerate(envs):
        bm = benchmarks(env)
        cutoff, value = best_binary_cutoff(env, 4096, bm)
        step = (env.prior.hi - env.prior.lo) / 4097
        c.check(f"env{i} argmax", abs(cutoff - bm.r_bar) <= step,
                f"|{cutoff:.6f} - {bm.r_bar:.6f}| vs {step:.2e}")
        c.check(f"env{i} value", abs(value - (bm.u_bar - bm.u_lo)) <= 1e-6,
                f"{abs(value - (bm.u_bar - bm.u_lo)):.2e}")
    return c


def criterion_4():
    c = Criterion(4, "bisection vs value iteration", time_limit=5.0)
    rng = np.random.default_rng(SEED + 4)
    env = uniform_env()
    f, bm = env.prior, benchmarks(env)
    dists = {"F": f, "G0": D.uninformative(f), "G*": D.binary_split(f, bm.r_bar),
             "GLC": D.lower_censorship(f, bm.r_bar)}
    for i in range(10):
        dists[f"mpc{i}"] = random_partition(f, rng)
    for name, g in dists.items():
        a = reservation_value(env, g).u
        b = value_iteration_oracle(env, g, tol=1e-12)
        c.check(name, abs(a - b) <= 1e-8, f"{abs(a - b):.2e}")
    return c


def criterion_5():
    c = Criterion(5, "Monte Carlo at n=1e5", time_limit=30.0)
    env = uniform_env()
    eq = equilibrium_passfail(env)
    rep = simulate_stationary(env, eq, 100_000, SEED)
    z_a = (rep.agent_mean - eq.U) / rep.agent_se
    z_p = (rep.principal_mean - eq.V) / rep.principal_se
    z_s = (rep.stop1_freq - (1 - R_BAR)) / rep.stop1_se
    c.check("agent mean", abs(z_a) <= 3, f"z={z_a:+.2f}")
    c.check("principal mean", abs(z_p) <= 3, f"z={z_p:+.2f}")
    c.check("period-1 stopping", abs(z_s) <= 3, f"z={z_s:+.2f}")
    return c


def _models():
    return {name: PublicSignalModel.from_literal(lit) for name, lit in
            (("singleton", M.singleton()), ("half_split", M.half_split()),
             ("reveal_interval", M.reveal_interval()))}


def criterion_6():
    c = Criterion(6, "public-signal regressions", time_limit=5.0)
    env = uniform_env()
    eq = equilibrium_passfail(env)
    peqs = {name: solve_public_equilibrium(env, m) for name, m in _models().items()}
    s = peqs["singleton"]
    c.check("(a) k*=0 exactly", s.k_star == 0.0, f"{s.k_star!r}")
    c.check("(a) r_xi", abs(s.r_xi - 1 / 3) <= 1e-12, f"{s.r_xi!r}")
    c.check("(a) U", abs(s.U - 0.5) <= 1e-9, f"{s.U!r}")
    c.check("(a) V", abs(s.V - V_UNIF) <= 1e-9, f"{s.V!r}")
    c.check("(a) price", abs(s.outcome("all").price - eq.price) <= 1e-6)
    h = peqs["half_split"]
    c.check("(b) r_xi", abs(h.r_xi - 0.375) <= 1e-8, f"{h.r_xi!r}")
    c.check("(b) k*=0", h.k_star == 0.0, f"{h.k_star!r}")
    c.check("(b) V", abs(h.V - (U_BAR - 0.5625)) <= 1e-8, f"{h.V!r}")
    r = peqs["reveal_interval"]
    c.check("(c) k*", abs(r.k_star - K_REVEAL) <= 1e-8, f"{r.k_star!r}")
    c.check("(c) V", abs(r.V - (U_BAR - 0.5 - K_REVEAL / DELTA)) <= 1e-8, f"{r.V!r}")
    for name, m in _models().items():
        p = peqs[name]
        top = p.r_bar - p.r_xi
        lo, hi = phi(m, 0.0, p.r_xi, p.r_bar), phi(m, top, p.r_xi, p.r_bar)
        c.check(f"bracket {name}", lo >= 0 >= hi, f"Phi(0)={lo:.3e}, Phi(top)={hi:.3e}")
    return c


def criterion_7():
    c = Criterion(7, "public-signal self-generation")
    env = uniform_env()
    for name, m in _models().items():
        p = solve_public_equilibrium(env, m)
        sg = sum(o.weight * o.psi for o in p.per_outcome) - p.V
        c.check(f"SG {name}", abs(sg) <= 1e-9, f"{sg:.2e}")
        for o in m:
            brute = cutoff_search_psi(o, p.V, p.r_xi, env.delta, grid_size=4096)
            gap = abs(brute - p.outcome(o.label).psi)
            c.check(f"psi {name}/{o.label}", gap <= 1e-6, f"{gap:.2e}")
    return c


def criterion_8():
    c = Criterion(8, "verification negatives via the CLI")
    with tempfile.TemporaryDirectory() as tmp:
        cfg = os.path.join(tmp, "u.json")
        with open(cfg, "w") as fh:
            json.dump(M.config(), fh)
        cases = (("overpriced.json", "PC"), ("full_info.json", "flatness"),
                 ("binary_r_lo.json", "PM"))
        for contract, flagged in cases:
            out = os.path.join(tmp, flagged)
            path = os.path.join(ROOT, "configs", "contracts", contract)
            with contextlib.redirect_stdout(io.StringIO()):
                code = cli_main(["verify", "--config", cfg, "--contract", path, "--out", out])
            with open(os.path.join(out, "verification.csv")) as fh:
                failed = {ln.split(",")[0] for ln in fh.read().splitlines()[1:]
                          if ln.split(",")[1] == "false"}
            c.check(f"{contract} exit 3", code == EXIT_VERIFY, f"exit {code}")
            c.check(f"{contract} flags {flagged}", flagged in failed, ",".join(sorted(failed)))
    env = uniform_env()
    # the lower-censorship equilibrium contract is the positive control
    c.check("positive control", verify_stationary(env, equilibrium_lower_censorship(env).contract)
            .passed)
    return c


def criterion_9():
    c = Criterion(9, "discount-factor sweep")
    deltas = [0.5, 0.9, 0.99, 0.999]
    prices, gains = {}, {}
    for d in deltas:
        env = uniform_env(d)
        eq = equilibrium_passfail(env)
        ident = eq.price / (1 - d * env.prior.cdf(eq.cutoff)) - eq.V
        c.check(f"identity delta={d}", abs(ident) <= 1e-10, f"{ident:.2e}")
        prices[d], gains[d] = eq.price, eq.V
    tail = deltas[1:]
    c.check("p decreasing on 0.9, 0.99, 0.999",
            all(prices[a] > prices[b] for a, b in zip(tail, tail[1:])),
            ", ".join(f"{prices[d]:.6f}" for d in tail))
    c.check("p(0.999) < 0.01*(u_bar - u_lo)", prices[0.999] < 0.01 * gains[0.999],
            f"p={prices[0.999]:.5f} vs {0.01 * gains[0.999]:.5f}")
    return c


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 10)])
def test_acceptance(criterion, capsys):
    report(criterion(), capsys)


if __name__ == "__main__":
    results = [crit().finish() for crit in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
