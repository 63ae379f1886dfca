"""Stationary equilibrium when a free public signal precedes each contract.

A public signal is a finite mixture: outcome ``z`` occurs with weight
``xi(z)`` and moves the agent's belief to the atomless interim prior ``F_z``.
The agent keeps the public-signal autarky payoff ``u(G^xi)``; the principal
loses ``k*/delta`` relative to full extraction, where ``k*`` solves
``k = delta/(1-delta) * Phi(k)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import DistributionError, DomainError, PmDist, Prior, from_literal, is_mpc, pass_fail
from .search import SolverError, benchmarks, bisect_root, reservation_value

MIXTURE_TOL = 1e-9
XBAR_TOL = 1e-12
K_TOL = 1e-12
SG_TOL = 1e-9

OPTIMISTIC = "Z1-optimistic"
PESSIMISTIC = "Z2-pessimistic"
INTERIOR = "Z3-interior"
CAPPED = "Z4-capped"


class ModelError(ValueError):
    """Public-signal model violates its preconditions."""


@dataclass(frozen=True)
class Outcome:
    label: str
    weight: float
    interim: Prior

    @property
    def lo(self):
        return self.interim.lo

    @property
    def hi(self):
        return self.interim.hi

    @property
    def mean(self):
        return self.interim.mean()


class PublicSignalModel:
    """Finite public signal: weighted atomless interim beliefs."""

    def __init__(self, outcomes):
        outcomes = tuple(outcomes)
        if not outcomes:
            raise ModelError("a public signal needs at least one outcome")
        labels = [o.label for o in outcomes]
        if len(set(labels)) != len(labels):
            raise ModelError("outcome labels must be unique")
        for o in outcomes:
            if not o.weight > 0:
                raise ModelError(f"outcome {o.label!r} has non-positive weight {o.weight!r}")
            if not isinstance(o.interim, Prior):
                raise ModelError(f"interim belief of {o.label!r} must be atomless")
        total = sum(o.weight for o in outcomes)
        if abs(total - 1.0) > MIXTURE_TOL:
            raise ModelError(f"outcome weights sum to {total!r}, expected 1")
        self.outcomes = outcomes

    def __iter__(self):
        return iter(self.outcomes)

    def __len__(self):
        return len(self.outcomes)

    def __getitem__(self, label):
        for o in self.outcomes:
            if o.label == label:
                return o
        raise KeyError(label)

    @property
    def weights(self):
        return np.array([o.weight for o in self.outcomes])

    @classmethod
    def from_literal(cls, obj):
        outs = []
        for item in obj["outcomes"]:
            lit = item["interim"]
            if lit.get("kind") == "mixed":
                raise ModelError("interim beliefs must be atomless")
            try:
                interim = from_literal(lit, full_support=False)
            except DistributionError as exc:
                raise ModelError(f"outcome {item['label']!r}: {exc}") from exc
            outs.append(Outcome(str(item["label"]), float(item["weight"]), interim))
        return cls(outs)

    @classmethod
    def singleton(cls, prior, label="all"):
        return cls([Outcome(label, 1.0, prior)])


def mixture_prior(model):
    """The prior implied by the model, ``sum_z xi(z) F_z`` (exact, piecewise linear)."""
    knots = np.unique(np.concatenate([o.interim.knots for o in model]))
    vals = sum(o.weight * o.interim.cdf(knots) for o in model)
    vals = vals / vals[-1]
    return Prior(knots, vals, full_support=False)


def check_consistency(model, prior, tol=MIXTURE_TOL):
    """Bayes plausibility: the mixture of interim CDFs must reproduce ``prior``."""
    grid = np.union1d(np.union1d(prior.knots, np.concatenate([o.interim.knots for o in model])),
                      np.linspace(prior.lo, prior.hi, 256))
    mix = sum(o.weight * o.interim.cdf(grid) for o in model)
    err = float(np.max(np.abs(mix - prior.cdf(grid))))
    if err > tol:
        raise ModelError(f"interim beliefs do not average to the prior (sup error {err:.3e})")
    return err


def public_posterior_mean_dist(model, prior=None):
    """Posterior-mean distribution ``G^xi``: an atom at each interim mean."""
    prior = mixture_prior(model) if prior is None else prior
    check_consistency(model, prior)
    g = PmDist(prior, locs=[o.mean for o in model], masses=[o.weight for o in model])
    rep = is_mpc(g, prior)
    if not rep.ok:
        raise ModelError(f"G^xi is not a contraction of the prior ({rep.max_violation:.3e})")
    return g


def xbar(model, z, r_xi, xtol=XBAR_TOL):
    """Largest pass/fail cutoff whose 'fail' still keeps the agent searching.

    ``sup{x in [lo_z, hi_z] : E_z[theta | theta <= x] <= r_xi}``.
    """
    o = model[z] if isinstance(z, str) else z
    f = o.interim
    if not f.lo <= r_xi <= f.hi:
        raise DomainError(f"r_xi={r_xi!r} outside the support [{f.lo:g}, {f.hi:g}] of {o.label!r}")
    if f.mean() <= r_xi:
        return f.hi

    # int_{lo}^{x} (theta - r_xi) dF_z has the sign of E[theta | theta <= x] - r_xi;
    # it falls until r_xi and rises afterwards, so bisect on [r_xi, hi]
    def ok(x):
        return f.partial_below(x) - r_xi * f.cdf(x) <= 0.0

    lo, hi = max(f.lo, r_xi), f.hi
    if not ok(lo):
        return lo
    for _ in range(400):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    x = lo
    return x


def _classify(o, r_xi):
    if r_xi < o.lo:
        return OPTIMISTIC
    if r_xi > o.hi:
        return PESSIMISTIC
    return None


def phi(model, k, r_xi, r_bar, prior=None):
    """Efficiency-loss function whose scaled fixed point is ``k*``.

    Sum of the surplus lost by inducing ``r_bar - k`` instead of ``r_bar``
    (negative), the concession on optimistic outcomes, and the concession
    on outcomes where ``xbar_z`` caps the achievable threshold.
    """
    top = r_bar - r_xi
    if k < -K_TOL or k > top + K_TOL:
        raise DomainError(f"k={k!r} outside [0, {top!r}]")
    k = min(max(k, 0.0), top)
    f = mixture_prior(model) if prior is None else prior
    target = r_bar - k
    total = -(f.expected_excess(target) - f.expected_excess(r_bar))
    for o in model:
        case = _classify(o, r_xi)
        if case == OPTIMISTIC:
            total += o.weight * o.interim.cdf_integral(r_xi, target)
        elif case is None:
            xb = xbar(model, o, r_xi)
            if xb < target:
                fz = o.interim
                total += o.weight * (fz.cdf_integral(xb, target) - fz.cdf(xb) * (target - xb))
    return float(total)


@dataclass(frozen=True)
class OutcomePlay:
    label: str
    case: str
    xbar: float
    cutoff: float
    price: float
    psi: float
    weight: float


@dataclass(frozen=True)
class PublicEquilibrium:
    U: float
    V: float
    r_xi: float
    k_star: float
    r_bar: float
    u_bar: float
    per_outcome: tuple
    sg_residual: float

    def outcome(self, label):
        for p in self.per_outcome:
            if p.label == label:
                return p
        raise KeyError(label)


def psi(o, V, r_xi, delta, xb=None):
    """Principal's one-period value after outcome ``o`` (four-case formula)."""
    case = _classify(o, r_xi)
    dv = delta * V
    if case == OPTIMISTIC:
        return case, 0.0
    if case == PESSIMISTIC:
        return case, dv
    fz = o.interim
    c0 = max(o.mean - r_xi, 0.0)
    # ties at xbar = delta*V + r_xi go to the interior case
    if xb >= dv + r_xi:
        return INTERIOR, float(fz.expected_excess(dv + r_xi) - c0 + dv)
    return CAPPED, float(fz.cdf(xb) * dv)


def passfail_price(o, x, r_xi):
    """Binding price of the pass/fail signal at cutoff ``x`` for outcome ``o``."""
    g = pass_fail(o.interim, x)
    return float(g.expected_excess(r_xi) - max(o.mean - r_xi, 0.0))


def solve_public_equilibrium(env, model, k_tol=K_TOL):
    """Payoffs and per-outcome pass/fail contracts of the public-signal equilibrium."""
    prior = env.prior
    check_consistency(model, prior)
    bm = benchmarks(env)
    g_xi = public_posterior_mean_dist(model, prior)
    r_xi = reservation_value(env, g_xi).r
    r_bar = bm.r_bar
    # r_lo <= r_xi <= r_bar up to bisection error
    r_xi = min(r_xi, r_bar)
    top = r_bar - r_xi
    ratio = env.delta / (1.0 - env.delta)

    def h(k):
        return ratio * phi(model, k, r_xi, r_bar, prior) - k

    if h(0.0) < 0 or h(top) > 0:
        raise ModelError("Phi fails to bracket its fixed point; check model consistency")
    k_star = 0.0 if h(0.0) == 0.0 else bisect_root(h, 0.0, top, xtol=k_tol, max_iter=400)[0]

    U = r_xi / env.delta
    V = bm.u_bar - U - k_star / env.delta
    plays = []
    for o in model:
        case = _classify(o, r_xi)
        xb = None if case else xbar(model, o, r_xi)
        case, value = psi(o, V, r_xi, env.delta, xb)
        if case in (OPTIMISTIC, PESSIMISTIC):
            cutoff, price = float("nan"), 0.0
        else:
            cutoff = min(xb, env.delta * V + r_xi)
            price = passfail_price(o, cutoff, r_xi)
        plays.append(OutcomePlay(o.label, case, float("nan") if xb is None else xb,
                                 cutoff, price, value, o.weight))
    sg = sum(p.weight * p.psi for p in plays) - V
    if abs(sg) > SG_TOL:
        raise SolverError(f"self-generation residual {sg:.3e} exceeds {SG_TOL}")
    return PublicEquilibrium(U=U, V=V, r_xi=r_xi, k_star=k_star, r_bar=r_bar, u_bar=bm.u_bar,
                             per_outcome=tuple(plays), sg_residual=sg)


def cutoff_search_psi(o, V, r_xi, delta, grid_size=4096, zoom=3):
    """Brute-force ``psi_z``: best pass/fail cutoff, prices set at binding PC.

    Scans cutoffs across the interim support (plus the all-fail signal),
    evaluating each induced two-atom distribution directly, then rescans the
    two cells around the best point ``zoom`` times.  The value can jump at
    the optimum, so the refinement matters for steep interim densities.
    """
    f = o.interim
    c0 = max(o.mean - r_xi, 0.0)
    dv = delta * V

    def values(xs):
        fx = f.cdf(xs)
        ok = (fx > 0) & (fx < 1)
        xs, fx = xs[ok], fx[ok]
        px = f.partial_below(xs)
        lo_m = px / fx
        hi_m = (o.mean - px) / (1.0 - fx)
        c = fx * np.maximum(lo_m - r_xi, 0.0) + (1.0 - fx) * np.maximum(hi_m - r_xi, 0.0)
        g_r = fx * (lo_m <= r_xi) + (1.0 - fx) * (hi_m <= r_xi)
        return xs, c - c0 + g_r * dv

    best = (1.0 if o.mean <= r_xi else 0.0) * dv  # uninformative signal
    lo, hi = f.lo, f.hi
    for _ in range(zoom + 1):
        step = (hi - lo) / (grid_size + 1)
        xs, vals = values(lo + step * np.arange(1, grid_size + 1))
        if not vals.size:
            break
        i = int(np.argmax(vals))
        best = max(best, float(vals[i]))
        lo, hi = max(f.lo, xs[i] - step), min(f.hi, xs[i] + step)
    return float(best)


def full_extraction_check(env, model):
    """Whether the principal extracts ``u_bar - u(G^xi)``.

    Defined only when every interim belief has full support on the prior's
    support; returns ``None`` otherwise.
    """
    prior = env.prior
    for o in model:
        f = o.interim
        if f.lo > prior.lo or f.hi < prior.hi or not f.full_support:
            return None
    bm = benchmarks(env)
    g_xi = public_posterior_mean_dist(model, prior)
    r_xi = reservation_value(env, g_xi).r
    for o in model:
        f = o.interim
        if f.partial_below(bm.r_bar) / f.cdf(bm.r_bar) > r_xi:
            return False
    return True
