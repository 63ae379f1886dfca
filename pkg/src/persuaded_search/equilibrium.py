"""Stationary equilibrium of the persuaded-search game.

The agent is held to autarky, ``U = u_lo``, while the principal sells a
signal that keeps the agent searching until the efficient threshold
``r_bar``.  The principal collects ``V = u_bar - u_lo`` through the
per-period price ``p = V * (1 - delta * F(r_bar))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dist import (
    binary_split,
    conditional_mean_above,
    conditional_mean_below,
    is_mpc,
    lower_censorship,
    mpc_grid,
    uninformative,
)
from .search import (
    Benchmarks,
    _require_search,
    benchmarks,
    bisect_root,
    reservation_value,
)

EQ_TOL = 1e-9
DOMINANCE_SLACK = 1e-10
PM_TOL = 1e-6
FLATNESS_POINTS = 256


class ContractError(ValueError):
    """Malformed contract (negative price or an infeasible signal)."""


@dataclass(frozen=True)
class Contract:
    price: float
    dist: object

    def __post_init__(self):
        if not self.price >= 0:
            raise ContractError(f"price must be nonnegative, got {self.price!r}")
        rep = is_mpc(self.dist, self.dist.reference)
        if not rep.ok:
            raise ContractError(
                f"signal is not a mean-preserving contraction of the prior "
                f"(violation {rep.max_violation:.3g} at {rep.at:.6g})")


@dataclass(frozen=True)
class EquilibriumSolution:
    U: float
    V: float
    contract: Contract
    benchmarks: Benchmarks
    cutoff: float
    m1: float
    m2: float

    @property
    def price(self):
        return self.contract.price

    @property
    def dist(self):
        return self.contract.dist

    @property
    def stop_probability(self):
        """Per-period probability that the agent stops, ``1 - G(r_lo)``."""
        return 1.0 - self.dist.cdf(self.benchmarks.r_lo)


def equilibrium_price(env, bm=None):
    bm = benchmarks(env) if bm is None else bm
    return (bm.u_bar - bm.u_lo) * (1.0 - env.delta * env.prior.cdf(bm.r_bar))


def _build(env, make_dist):
    bm = benchmarks(env)
    f = env.prior
    dist = make_dist(f, bm.r_bar)
    price = equilibrium_price(env, bm)
    sol = EquilibriumSolution(
        U=bm.u_lo,
        V=bm.u_bar - bm.u_lo,
        contract=Contract(price, dist),
        benchmarks=bm,
        cutoff=bm.r_bar,
        m1=conditional_mean_below(f, bm.r_bar),
        m2=conditional_mean_above(f, bm.r_bar),
    )
    # binding participation must reproduce the closed-form price
    binding = dist.expected_excess(bm.r_lo) - uninformative(f).expected_excess(bm.r_lo)
    if abs(binding - price) > EQ_TOL:
        raise ArithmeticError(f"price mismatch: binding PC {binding!r} vs closed form {price!r}")
    if abs(dist.cdf(bm.r_lo) - f.cdf(bm.r_bar)) > EQ_TOL:
        raise ArithmeticError("equilibrium signal is not flat at F(r_bar) on [r_lo, r_bar]")
    return sol


def equilibrium_passfail(env):
    """Equilibrium with the pass/fail signal at ``r_bar`` (least informative)."""
    return _build(env, binary_split)


def equilibrium_lower_censorship(env):
    """Equilibrium with lower censorship at ``r_bar``; same payoffs and price."""
    return _build(env, lower_censorship)


def principal_value(env, g, bm=None):
    """Principal's stationary value of selling ``g`` at the binding price.

    ``(c_g(r_lo) - c_0(r_lo)) / (1 - delta * g(r_lo))`` with ``c_0`` the
    uninformative benchmark.
    """
    _require_search(env)
    bm = benchmarks(env) if bm is None else bm
    r = bm.r_lo
    num = g.expected_excess(r) - max(env.mean - r, 0.0)
    return num / (1.0 - env.delta * g.cdf(r))


def binary_cutoff_values(env, cutoffs, bm=None):
    """Principal value of the pass/fail split at each cutoff.

    Computed straight from the prior's CDF and partial first moments, without
    going through ``binary_split``.
    """
    bm = benchmarks(env) if bm is None else bm
    f = env.prior
    x = np.asarray(cutoffs, dtype=float)
    r = bm.r_lo
    fx = f.cdf(x)
    px = f.partial_below(x)
    m1 = px / fx
    m2 = (f.mean() - px) / (1.0 - fx)
    c = fx * np.maximum(m1 - r, 0.0) + (1.0 - fx) * np.maximum(m2 - r, 0.0)
    g_at_r = fx * (m1 <= r) + (1.0 - fx) * (m2 <= r)
    return (c - max(f.mean() - r, 0.0)) / (1.0 - env.delta * g_at_r)


def cutoff_grid(env, grid_size):
    f = env.prior
    return f.lo + (f.hi - f.lo) * np.arange(1, grid_size + 1) / (grid_size + 1)


def best_binary_cutoff(env, grid_size=4096, bm=None):
    """Brute-force the pass/fail cutoff that maximizes the principal's value.

    Returns ``(cutoff, value)``; the grid spacing is
    ``(theta_hi - theta_lo) / (grid_size + 1)``.
    """
    _require_search(env)
    grid = cutoff_grid(env, grid_size)
    vals = binary_cutoff_values(env, grid, bm)
    i = int(np.argmax(vals))
    return float(grid[i]), float(vals[i])


# -- verification --------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float
    tol: float
    detail: str = ""


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    U: float = float("nan")
    V: float = float("nan")

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self):
        return [c.name for c in self.checks if not c.passed]

    def format(self):
        lines = [f"{'condition':<12} {'status':<6} {'residual':>14} {'tol':>9}  detail"]
        for c in self.checks:
            lines.append(f"{c.name:<12} {'pass' if c.passed else 'FAIL':<6} "
                         f"{c.residual:>14.6e} {c.tol:>9.1e}  {c.detail}")
        lines.append(f"overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def agent_value_under(env, contract):
    """Agent's stationary value when the contract is offered every period.

    Each period the agent either buys the signal or goes without, so
    ``U = delta*U + max{c_G(delta*U) - p, c_0(delta*U)}``.
    """
    g = contract.dist
    m0 = env.mean
    ratio = env.delta / (1.0 - env.delta)

    def h(r):
        gain = max(g.expected_excess(r) - contract.price, max(m0 - r, 0.0))
        return ratio * gain - r

    r, _ = bisect_root(h, env.prior.lo, env.prior.hi)
    return r / env.delta


def verify_stationary(env, contract, grid_size=4096):
    """Check a stationary contract against the equilibrium conditions.

    Failing conditions are report entries, never exceptions.
    """
    _require_search(env)
    bm = benchmarks(env)
    f, d = env.prior, env.delta
    g, p = contract.dist, contract.price
    r_lo, r_bar = bm.r_lo, bm.r_bar
    V = bm.u_bar - bm.u_lo
    c0_rlo = max(env.mean - r_lo, 0.0)
    gstar = binary_split(f, r_bar)
    rep = VerificationReport(V=V)

    def scale(*xs):
        return max(1.0, *(abs(x) for x in xs))

    # agent's continuation value and stopping threshold
    U = agent_value_under(env, contract)
    rep.U = U
    tol = EQ_TOL * scale(bm.u_lo)
    rep.checks.append(Check("OS", abs(U - bm.u_lo) <= tol, U - bm.u_lo, tol,
                            f"stopping threshold delta*U={d * U:.10g} vs r_lo={r_lo:.10g}"))

    margin = g.expected_excess(r_lo) - c0_rlo - p
    tol = EQ_TOL * scale(p)
    status = "binds" if abs(margin) <= tol else ("agent rejects" if margin < 0 else "slack")
    rep.checks.append(Check("PC", abs(margin) <= tol, margin, tol, status))

    resid = U - (d * U + g.expected_excess(d * U) - p)
    tol = EQ_TOL * scale(U)
    rep.checks.append(Check("SG-A", abs(resid) <= tol, resid, tol,
                            "accepting is optimal at U" if abs(resid) <= tol else
                            "agent is better off rejecting"))

    g_rlo = g.cdf(r_lo)
    resid = V - p - g_rlo * d * V
    tol = EQ_TOL * scale(V)
    rep.checks.append(Check("SG-P", abs(resid) <= tol, resid, tol))

    resid = g_rlo - f.cdf(r_bar)
    rep.checks.append(Check("G(r_lo)", abs(resid) <= EQ_TOL, resid, EQ_TOL,
                            f"G(r_lo)={g_rlo:.10g}, F(r_bar)={f.cdf(r_bar):.10g}"))

    grid = mpc_grid(gstar, g)
    gap = g.expected_excess(grid) - gstar.expected_excess(grid)
    worst = float(np.min(gap))
    at_rlo = g.expected_excess(r_lo) - gstar.expected_excess(r_lo)
    ok = worst >= -DOMINANCE_SLACK and abs(at_rlo) <= EQ_TOL
    rep.checks.append(Check("dominance", ok, min(worst, -abs(at_rlo)) if not ok else worst,
                            DOMINANCE_SLACK,
                            f"min(c_G - c_G*)={worst:.3e}, gap at r_lo={at_rlo:.3e}"))

    pts = np.linspace(r_lo, r_bar, FLATNESS_POINTS)
    bp = g.breakpoints()
    pts = np.union1d(pts, bp[(bp >= r_lo) & (bp <= r_bar)])
    dev = np.abs(g.cdf(pts) - f.cdf(r_bar))
    worst = float(np.max(dev))
    rep.checks.append(Check("flatness", worst <= EQ_TOL, worst, EQ_TOL,
                            f"max |G - F(r_bar)| on [r_lo, r_bar] at {pts[int(np.argmax(dev))]:.6g}"))

    tangency = gstar.expected_excess(r_bar) - f.expected_excess(r_bar)
    rep.checks.append(Check("tangency", abs(tangency) <= EQ_TOL, tangency, EQ_TOL,
                            "c_G* touches c_F at r_bar"))

    _, best = best_binary_cutoff(env, grid_size, bm)
    objective = p + g_rlo * d * V
    feasible = margin >= -EQ_TOL * scale(p)
    ok = feasible and objective >= best - PM_TOL
    rep.checks.append(Check("PM", ok, objective - best, PM_TOL,
                            f"objective {objective:.10g} vs binary-cutoff oracle {best:.10g}"
                            + ("" if feasible else " (contract rejected)")))
    return rep
