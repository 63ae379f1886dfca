"""Single-agent stationary search with a free signal each period.

The searcher's continuation value ``u`` solves ``u = E_G[max{m, delta*u}]``;
under ``theta_lo < delta * mean`` this is equivalent to the reservation value
``r = delta*u`` solving ``r = delta/(1-delta) * c_G(r)``, which is found here
by bisection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import Prior, uninformative

BISECT_XTOL = 1e-12
BISECT_MAXITER = 200


class NeverSearchError(ValueError):
    """The agent consumes the first good for every signal (no value of information)."""


class SolverError(RuntimeError):
    """A fixed-point iteration did not converge."""


@dataclass(frozen=True)
class Environment:
    prior: Prior
    delta: float

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta!r}")
        if not isinstance(self.prior, Prior) or not self.prior.full_support:
            raise ValueError("the quality prior must be an atomless full-support Prior")
        if not self.prior.theta_hi > 0:
            raise ValueError("theta_hi must be positive")

    @property
    def mean(self):
        return self.prior.mean()

    @property
    def agent_may_search(self):
        """``theta_lo < delta * E[theta]``."""
        return self.prior.theta_lo < self.delta * self.mean


@dataclass(frozen=True)
class SearchValues:
    u: float
    r: float
    iterations: int = 0


@dataclass(frozen=True)
class Benchmarks:
    u_lo: float   # autarky payoff
    u_bar: float  # efficient surplus
    r_lo: float
    r_bar: float

    def as_tuple(self):
        return (self.u_lo, self.u_bar, self.r_lo, self.r_bar)


def never_searches(env):
    # weak inequality: the boundary counts as never-search
    return env.prior.theta_lo >= env.delta * env.mean


def _require_search(env):
    if never_searches(env):
        raise NeverSearchError(
            f"theta_lo={env.prior.theta_lo:g} >= delta*mean={env.delta * env.mean:g}: "
            "the agent never searches, so information has no value")


def bisect_root(h, lo, hi, xtol=BISECT_XTOL, max_iter=BISECT_MAXITER):
    """Root of a function with ``h(lo) >= 0 >= h(hi)`` (decreasing sign change)."""
    hlo, hhi = h(lo), h(hi)
    if hlo < 0 or hhi > 0:
        raise SolverError(f"root not bracketed: h({lo})={hlo}, h({hi})={hhi}")
    if hlo == 0:
        return lo, 0
    if hhi == 0:
        return hi, 0
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return mid, it
        hm = h(mid)
        if hm == 0:
            return mid, it
        if hm > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= xtol:
            return 0.5 * (lo + hi), it
    raise SolverError(f"bisection did not reach xtol={xtol} in {max_iter} iterations")


def reservation_value(env, g=None, xtol=BISECT_XTOL, max_iter=BISECT_MAXITER):
    """Reservation value ``r(G)`` and payoff ``u(G) = r/delta``.

    ``g`` defaults to the prior itself (full information).
    """
    _require_search(env)
    g = env.prior if g is None else g
    ratio = env.delta / (1.0 - env.delta)
    lo, hi = env.prior.theta_lo, env.prior.theta_hi

    def h(r):
        return ratio * g.expected_excess(r) - r

    r, it = bisect_root(h, lo, hi, xtol, max_iter)
    return SearchValues(u=r / env.delta, r=r, iterations=it)


def fixed_point_residual(env, g, u):
    """Residual of ``u = delta*u + c_G(delta*u)``."""
    x = env.delta * u
    return u - x - g.expected_excess(x)


def benchmarks(env):
    """Autarky and efficient values ``(u_lo, u_bar, r_lo, r_bar)``."""
    _require_search(env)
    u_lo = max(env.mean, 0.0)
    check = reservation_value(env, uninformative(env.prior))
    if abs(check.u - u_lo) > 1e-9:
        raise SolverError(f"autarky payoff mismatch: {check.u} vs {u_lo}")
    eff = reservation_value(env, env.prior)
    r_lo = env.delta * u_lo
    if not r_lo < eff.r:
        raise SolverError("expected r_lo < r_bar under the search assumption")
    return Benchmarks(u_lo=u_lo, u_bar=eff.u, r_lo=r_lo, r_bar=eff.r)


def _expected_max(g, t):
    """``E_G[max{m, t}]`` from the segment/atom data directly (not via c_G)."""
    total = float(np.sum(g.masses * np.maximum(g.locs, t)))
    a, b, w = g._a, g._b, g._w
    if w.size:
        share = np.clip((t - a) / (b - a), 0.0, 1.0)
        mid = np.clip(t, a, b)
        # below t the integrand is t, above it is m (mean of the uniform piece)
        total += float(np.sum(w * (share * t + (1.0 - share) * (mid + b) / 2.0)))
    return total


def value_iteration_oracle(env, g=None, tol=1e-12, max_iter=1_000_000, trace=False):
    """Iterate ``u <- E_G[max{m, delta*u}]`` from ``u0 = E[theta]``.

    Independent of the bisection path; works whether or not the agent ever
    searches.  Stops once successive iterates differ by less than ``tol``.
    With ``trace=True`` the list of iterates is returned as well.
    """
    g = env.prior if g is None else g
    u = env.mean
    hist = [u]
    for _ in range(max_iter):
        nxt = _expected_max(g, env.delta * u)
        if trace:
            hist.append(nxt)
        if abs(nxt - u) < tol:
            return (nxt, hist) if trace else nxt
        u = nxt
    raise SolverError("value iteration hit its iteration cap")
