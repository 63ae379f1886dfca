"""Monte Carlo playouts of the search game under a stationary contract policy.

Each episode gets its own random stream derived from ``(seed, episode)``
through ``numpy.random.SeedSequence``, so results do not depend on the
order in which episodes are run.  Periods are drawn in blocks and episodes
are truncated at ``horizon`` periods; the truncation bias is bounded by
``delta**horizon * max|theta|`` and reported.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .public import OPTIMISTIC, PESSIMISTIC

HORIZON = 10_000
BLOCK = 32


@dataclass(frozen=True)
class EpisodeResult:
    stop_period: int
    agent_payoff: float
    principal_payoff: float
    consumed: float
    truncated: bool = False


@dataclass
class SimulationReport:
    n_episodes: int
    agent_mean: float
    agent_se: float
    principal_mean: float
    principal_se: float
    stopping_histogram: dict
    seed: int
    stop1_freq: float = float("nan")
    stop1_se: float = float("nan")
    mean_stop_period: float = float("nan")
    truncated: int = 0
    truncation_bound: float = 0.0
    extra: dict = field(default_factory=dict)

    def rows(self):
        out = [
            ("n_episodes", self.n_episodes),
            ("seed", self.seed),
            ("agent_mean", self.agent_mean),
            ("agent_se", self.agent_se),
            ("principal_mean", self.principal_mean),
            ("principal_se", self.principal_se),
            ("stop1_freq", self.stop1_freq),
            ("stop1_se", self.stop1_se),
            ("mean_stop_period", self.mean_stop_period),
            ("truncated", self.truncated),
            ("truncation_bound", self.truncation_bound),
        ]
        out.extend(self.extra.items())
        return out

    def write_csv(self, path, fmt=None):
        fmt = fmt or (lambda v: v)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["statistic", "value"])
            for k, v in self.rows():
                w.writerow([k, fmt(v)])

    def write_histogram_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["period", "count"])
            for t in sorted(self.stopping_histogram):
                w.writerow([t, self.stopping_histogram[t]])


def episode_rng(seed, episode):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(episode,)))


def _play(rng, delta, draw_period, threshold, horizon):
    """Run one episode; ``draw_period(rng, size)`` returns (posterior means, prices)."""
    paid = 0.0
    disc = 1.0
    t0 = 0
    while t0 < horizon:
        size = min(BLOCK, horizon - t0)
        m, prices = draw_period(rng, size)
        # ties at the threshold keep searching
        hit = np.flatnonzero(m > threshold)
        steps = size if hit.size == 0 else hit[0] + 1
        powers = disc * delta ** np.arange(steps)
        paid += float(np.dot(powers, prices[:steps]))
        if hit.size:
            j = hit[0]
            t = t0 + j + 1
            value = powers[j] * float(m[j])
            return EpisodeResult(t, value - paid, paid, float(m[j]))
        disc *= delta ** size
        t0 += size
    return EpisodeResult(horizon, -paid, paid, float("nan"), truncated=True)


def _summarize(results, n, seed, delta, theta_bound, horizon):
    agent = np.array([r.agent_payoff for r in results])
    principal = np.array([r.principal_payoff for r in results])
    stops = np.array([r.stop_period for r in results])
    hist = {}
    for t, c in zip(*np.unique(stops, return_counts=True)):
        hist[int(t)] = int(c)

    def mean_se(x):
        mu = math.fsum(x) / n
        if n < 2:
            return mu, float("nan")
        var = math.fsum((x - mu) ** 2) / (n - 1)
        return mu, math.sqrt(var / n)

    am, ase = mean_se(agent)
    pm, pse = mean_se(principal)
    p1 = hist.get(1, 0) / n
    return SimulationReport(
        n_episodes=n, agent_mean=am, agent_se=ase, principal_mean=pm, principal_se=pse,
        stopping_histogram=hist, seed=seed, stop1_freq=p1,
        stop1_se=math.sqrt(p1 * (1 - p1) / n), mean_stop_period=math.fsum(stops) / n,
        truncated=int(sum(r.truncated for r in results)),
        truncation_bound=delta ** horizon * theta_bound,
    )


def simulate_policy(prior, delta, dist, price, threshold, n, seed, horizon=HORIZON):
    """Episodes under a fixed signal, price and stopping threshold.

    Qualities are drawn from ``prior`` and mapped through ``dist.signal``
    when the distribution records its partition; otherwise posterior means
    are drawn from ``dist`` directly.
    """
    if n < 1:
        raise ValueError("need at least one episode")
    signal = getattr(dist, "signal", None)

    def draw(rng, size):
        u = rng.random(size)
        if signal is not None:
            m = signal.posterior_mean(prior.quantile(u))
        else:
            m = np.asarray(dist.quantile(u))
        return m, np.full(size, price)

    results = [_play(episode_rng(seed, i), delta, draw, threshold, horizon) for i in range(n)]
    bound = max(abs(prior.lo), abs(prior.hi))
    return _summarize(results, n, seed, delta, bound, horizon)


def simulate_stationary(env, eq, n, seed, horizon=HORIZON):
    """Play the stationary equilibrium; the agent stops iff the posterior mean exceeds ``r_lo``."""
    rep = simulate_policy(env.prior, env.delta, eq.dist, eq.price, eq.benchmarks.r_lo,
                          n, seed, horizon)
    rep.extra.update(U=eq.U, V=eq.V, price=eq.price,
                     stop_probability=eq.stop_probability)
    return rep


def simulate_public(env, model, peq, n, seed, horizon=HORIZON):
    """Play the public-signal equilibrium.

    Each period draws ``z`` from the public signal and the quality from
    ``F_z``.  Optimistic outcomes stop at once for free, pessimistic ones
    continue for free, and the rest buy the pass/fail test at ``x_z``.
    """
    if n < 1:
        raise ValueError("need at least one episode")
    outs = list(model)
    cum = np.cumsum([o.weight for o in outs])
    cum[-1] = 1.0
    plays = [peq.outcome(o.label) for o in outs]
    threshold = peq.r_xi
    means = np.array([o.mean for o in outs])
    prices = np.array([p.price for p in plays])
    tested = np.array([p.case not in (OPTIMISTIC, PESSIMISTIC) for p in plays])
    cut = np.array([p.cutoff if t else np.nan for p, t in zip(plays, tested)])
    fail_mean = np.full(len(outs), np.nan)
    pass_mean = np.full(len(outs), np.nan)
    for i, (o, t) in enumerate(zip(outs, tested)):
        if t:
            f = o.interim
            fx = f.cdf(cut[i])
            if fx >= 1.0:
                fail_mean[i] = pass_mean[i] = o.mean
            else:
                px = f.partial_below(cut[i])
                fail_mean[i] = px / fx if fx > 0 else o.mean
                pass_mean[i] = (o.mean - px) / (1.0 - fx)

    def draw(rng, size):
        u = rng.random((2, size))
        z = np.minimum(np.searchsorted(cum, u[0], side="right"), len(outs) - 1)
        m = means[z].copy()
        for i in np.flatnonzero(tested):
            sel = z == i
            if not sel.any():
                continue
            theta = outs[i].interim.quantile(u[1][sel])
            m[sel] = np.where(theta > cut[i], pass_mean[i], fail_mean[i])
        return m, prices[z]

    results = [_play(episode_rng(seed, i), env.delta, draw, threshold, horizon) for i in range(n)]
    bound = max(abs(env.prior.lo), abs(env.prior.hi))
    rep = _summarize(results, n, seed, env.delta, bound, horizon)
    rep.extra.update(U=peq.U, V=peq.V, k_star=peq.k_star)
    return rep
