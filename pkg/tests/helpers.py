"""Shared generators for randomized priors and partition signals."""

import numpy as np
from hypothesis import assume, strategies as st

from persuaded_search import dist as D
from persuaded_search.search import Environment


def random_prior(rng, n_knots=None, shift=None):
    """Piecewise-linear prior with strictly positive density on its support."""
    n = int(rng.integers(2, 9)) if n_knots is None else n_knots
    lo = float(rng.uniform(-0.3, 0.3)) if shift is None else shift
    widths = rng.uniform(0.05, 1.0, n - 1)
    knots = lo + np.concatenate([[0.0], np.cumsum(widths)])
    mass = rng.uniform(0.05, 1.0, n - 1)
    cvals = np.concatenate([[0.0], np.cumsum(mass)]) / mass.sum()
    return D.Prior(knots, cvals)


def random_env(rng, delta=None):
    """Environment that satisfies the search assumption."""
    while True:
        prior = random_prior(rng)
        d = float(rng.uniform(0.3, 0.95)) if delta is None else delta
        env = Environment(prior, d)
        if env.agent_may_search:
            return env


def random_partition(prior, rng, max_cells=6):
    k = int(rng.integers(1, max_cells + 1))
    inner = np.sort(rng.uniform(prior.lo, prior.hi, k - 1))
    inner = inner[np.diff(np.concatenate([[prior.lo], inner])) > 1e-6]
    edges = np.concatenate([[prior.lo], inner, [prior.hi]])
    pooled = rng.random(edges.size - 1) < 0.6
    return D.from_partition(prior, edges, pooled)


@st.composite
def priors(draw, max_knots=8):
    n = draw(st.integers(2, max_knots))
    lo = draw(st.floats(-0.5, 0.5))
    widths = draw(st.lists(st.floats(0.02, 1.0), min_size=n - 1, max_size=n - 1))
    mass = draw(st.lists(st.floats(0.02, 1.0), min_size=n - 1, max_size=n - 1))
    knots = lo + np.concatenate([[0.0], np.cumsum(widths)])
    cvals = np.concatenate([[0.0], np.cumsum(mass)]) / sum(mass)
    return D.Prior(knots, cvals)


@st.composite
def partitions(draw, prior):
    fracs = draw(st.lists(st.floats(0.01, 0.99), min_size=0, max_size=5, unique=True))
    inner = np.sort(prior.lo + (prior.hi - prior.lo) * np.asarray(fracs, dtype=float))
    edges = np.concatenate([[prior.lo], inner, [prior.hi]])
    keep = np.concatenate([[True], np.diff(edges) > 1e-6])
    keep[-1] = True
    edges = edges[keep]
    if edges.size > 2 and edges[-1] - edges[-2] <= 1e-6:
        edges = np.delete(edges, -2)
    pooled = draw(st.lists(st.booleans(), min_size=edges.size - 1, max_size=edges.size - 1))
    return D.from_partition(prior, edges, pooled)


@st.composite
def search_envs(draw):
    prior = draw(priors())
    delta = draw(st.floats(0.2, 0.97))
    assume(prior.hi > 0)
    env = Environment(prior, delta)
    assume(env.agent_may_search)
    # keep clear of the never-search boundary so tolerances stay meaningful
    assume(delta * env.mean - prior.lo > 1e-3)
    return env
