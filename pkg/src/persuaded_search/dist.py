"""Priors and posterior-mean distributions.

Every distribution is a finite set of atoms plus a continuous part whose
(sub-)CDF is piecewise linear, i.e. a piecewise-uniform density.  All the
quantities the solvers need (CDF, mean, partial expectations, the
incremental-benefit function ``c(x) = E[(m - x)^+]``) are computed in closed
form segment by segment, so there is no quadrature error anywhere.

CDFs are right-continuous: ``cdf(x)`` includes an atom located at ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PROJECTION_KNOTS = 1024
MPC_REFINEMENT = 256
MPC_TOL = 1e-9


class DistributionError(ValueError):
    """Malformed distribution data."""


class DomainError(ValueError):
    """Argument outside the support interval of a distribution."""


class UndefinedConditionalError(ValueError):
    """Conditioning on an event of probability zero."""


class DegenerateCutoffError(ValueError):
    """Cutoff on or outside the boundary of the support."""


class Distribution:
    """Atoms plus a piecewise-linear continuous sub-CDF on ``[lo, hi]``.

    ``knots`` / ``cvals`` describe the continuous part: ``cvals`` is the mass
    of the continuous part at or below each knot (nondecreasing, starting at
    0).  ``locs`` / ``masses`` are the atoms.  Instances are treated as
    immutable; the arrays are made read-only.
    """

    def __init__(self, knots=(), cvals=(), locs=(), masses=(), lo=None, hi=None):
        knots = np.asarray(knots, dtype=float).reshape(-1)
        cvals = np.asarray(cvals, dtype=float).reshape(-1)
        locs = np.asarray(locs, dtype=float).reshape(-1)
        masses = np.asarray(masses, dtype=float).reshape(-1)
        if knots.size != cvals.size:
            raise DistributionError("knots and CDF values differ in length")
        if knots.size == 1:
            raise DistributionError("a continuous part needs at least two knots")
        if knots.size:
            if np.any(np.diff(knots) <= 0):
                raise DistributionError("knots must be strictly increasing")
            if abs(cvals[0]) > 1e-14:
                raise DistributionError("continuous part must start at zero mass")
            if np.any(np.diff(cvals) < -1e-15):
                raise DistributionError("CDF values must be nondecreasing")
            cvals = np.maximum.accumulate(np.clip(cvals, 0.0, None))
            cvals[0] = 0.0
        if locs.size != masses.size:
            raise DistributionError("atom locations and masses differ in length")
        if np.any(masses < 0):
            raise DistributionError("negative atom mass")
        keep = masses > 0
        locs, masses = locs[keep], masses[keep]
        if locs.size:
            order = np.argsort(locs, kind="stable")
            locs, masses = locs[order], masses[order]
            # merge atoms sharing a location
            uniq, inv = np.unique(locs, return_inverse=True)
            if uniq.size != locs.size:
                masses = np.bincount(inv, weights=masses)
                locs = uniq
        total = (cvals[-1] if cvals.size else 0.0) + masses.sum()
        if abs(total - 1.0) > 1e-9:
            raise DistributionError(f"total mass is {total!r}, expected 1")

        pts = [a for a in (knots[:1], knots[-1:], locs[:1], locs[-1:]) if a.size]
        lo_data = min(float(a[0]) for a in pts)
        hi_data = max(float(a[-1]) for a in pts)
        self.lo = lo_data if lo is None else float(lo)
        self.hi = hi_data if hi is None else float(hi)
        if not self.lo <= lo_data or not hi_data <= self.hi:
            raise DistributionError("mass outside the declared support interval")

        for arr in (knots, cvals, locs, masses):
            arr.setflags(write=False)
        self.knots, self.cvals = knots, cvals
        self.locs, self.masses = locs, masses
        # per-segment data for the continuous part
        if knots.size:
            self._a = knots[:-1]
            self._b = knots[1:]
            self._w = np.diff(cvals)
        else:
            self._a = self._b = self._w = np.zeros(0)
        self._atom_cum = np.cumsum(masses)
        self._atom_first = np.cumsum(masses * locs)

    # -- basic evaluation -------------------------------------------------
    @property
    def continuous_mass(self):
        return float(self.cvals[-1]) if self.cvals.size else 0.0

    @property
    def has_atoms(self):
        return bool(self.locs.size)

    def cdf(self, x):
        """``P(m <= x)``; vectorized."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        if self.knots.size:
            out = out + np.interp(x, self.knots, self.cvals, left=0.0, right=self.cvals[-1])
        if self.locs.size:
            idx = np.searchsorted(self.locs, x, side="right")
            out = out + np.where(idx > 0, self._atom_cum[np.maximum(idx - 1, 0)], 0.0)
        return out if out.ndim else float(out)

    def cdf_left(self, x):
        """``P(m < x)``."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        if self.knots.size:
            out = out + np.interp(x, self.knots, self.cvals, left=0.0, right=self.cvals[-1])
        if self.locs.size:
            idx = np.searchsorted(self.locs, x, side="left")
            out = out + np.where(idx > 0, self._atom_cum[np.maximum(idx - 1, 0)], 0.0)
        return out if out.ndim else float(out)

    def mean(self):
        cont = float(np.sum(self._w * (self._a + self._b) / 2.0))
        return cont + float(np.sum(self.masses * self.locs))

    def partial_below(self, x):
        """``E[m ; m <= x]``, the first moment restricted to ``m <= x``."""
        x = np.asarray(x, dtype=float)
        xe = x[..., None]
        out = np.zeros_like(x)
        if self._w.size:
            y = np.clip(xe, self._a, self._b)
            frac = (y - self._a) / (self._b - self._a)
            out = out + np.sum(self._w * frac * (self._a + y) / 2.0, axis=-1)
        if self.locs.size:
            idx = np.searchsorted(self.locs, x, side="right")
            out = out + np.where(idx > 0, self._atom_first[np.maximum(idx - 1, 0)], 0.0)
        return out if out.ndim else float(out)

    def expected_excess(self, x):
        """``E[(m - x)^+] = int_x^inf (1 - G)``, valid for every real ``x``."""
        x = np.asarray(x, dtype=float)
        xe = x[..., None]
        out = np.zeros_like(x)
        if self._w.size:
            dens = self._w / (self._b - self._a)
            y = np.clip(xe, self._a, self._b)
            out = out + np.sum(dens * (self._b - y) * (self._b + y - 2.0 * xe) / 2.0, axis=-1)
        if self.locs.size:
            out = out + np.sum(self.masses * np.maximum(self.locs - xe, 0.0), axis=-1)
        return out if out.ndim else float(out)

    def expected_shortfall(self, x):
        """``E[(x - m)^+] = int_-inf^x G``, valid for every real ``x``."""
        x = np.asarray(x, dtype=float)
        xe = x[..., None]
        out = np.zeros_like(x)
        if self._w.size:
            dens = self._w / (self._b - self._a)
            y = np.clip(xe, self._a, self._b)
            out = out + np.sum(dens * (y - self._a) * (2.0 * xe - self._a - y) / 2.0, axis=-1)
        if self.locs.size:
            out = out + np.sum(self.masses * np.maximum(xe - self.locs, 0.0), axis=-1)
        return out if out.ndim else float(out)

    def cdf_integral(self, a, b):
        """``int_a^b G(m) dm``."""
        return self.expected_shortfall(b) - self.expected_shortfall(a)

    def quantile(self, u):
        """Generalized inverse of the CDF (smallest ``x`` with ``G(x) >= u``)."""
        u = np.asarray(u, dtype=float)
        if not self.locs.size:
            return np.interp(u, self.cvals, self.knots)
        xs = self.breakpoints()
        gs = self.cdf(xs)
        idx = np.searchsorted(gs, u, side="left")
        idx = np.minimum(idx, xs.size - 1)
        lo_g = np.where(idx > 0, gs[np.maximum(idx - 1, 0)], 0.0)
        lo_x = np.where(idx > 0, xs[np.maximum(idx - 1, 0)], xs[0])
        # inside a linear piece unless the jump happens exactly at xs[idx]
        left_at = self.cdf_left(xs[idx])
        in_jump = u > left_at
        span = left_at - lo_g
        t = np.where(span > 0, (u - lo_g) / np.where(span > 0, span, 1.0), 1.0)
        out = np.where(in_jump, xs[idx], lo_x + np.clip(t, 0, 1) * (xs[idx] - lo_x))
        return out if out.ndim else float(out)

    def breakpoints(self):
        """Sorted union of knots and atom locations."""
        return np.union1d(self.knots, self.locs)

    def __repr__(self):
        return (f"{type(self).__name__}(lo={self.lo:g}, hi={self.hi:g}, "
                f"knots={self.knots.size}, atoms={self.locs.size})")


class Prior(Distribution):
    """Atomless prior with a piecewise-linear CDF on ``[theta_lo, theta_hi]``.

    With ``full_support=True`` (the default, required for the quality prior
    of the search game) the CDF must be strictly increasing.  Interim beliefs
    of a public signal may have gaps and are built with
    ``full_support=False``; leading and trailing flat stretches are then
    trimmed so that ``lo``/``hi`` are the support bounds.
    """

    def __init__(self, knots, cdf_values, full_support=True, projection_error=0.0):
        knots = np.asarray(knots, dtype=float)
        vals = np.asarray(cdf_values, dtype=float)
        if knots.size < 2 or knots.size != vals.size:
            raise DistributionError("a prior needs matching knots and CDF values (>= 2)")
        if abs(vals[0]) > 1e-12 or abs(vals[-1] - 1.0) > 1e-9:
            raise DistributionError("prior CDF must run from 0 to 1")
        vals = vals.copy()
        vals[0], vals[-1] = 0.0, 1.0
        if full_support:
            if np.any(np.diff(vals) <= 0):
                raise DistributionError("prior CDF must be strictly increasing (full support)")
        else:
            first = np.flatnonzero(vals > 0)[0] - 1
            last = np.flatnonzero(vals >= 1.0)[0]
            knots, vals = knots[first:last + 1], vals[first:last + 1]
        super().__init__(knots, vals)
        if not self.hi > self.lo:
            raise DistributionError("theta_hi must exceed theta_lo")
        self.full_support = bool(full_support) or bool(np.all(np.diff(vals) > 0))
        self.projection_error = float(projection_error)

    @property
    def theta_lo(self):
        return self.lo

    @property
    def theta_hi(self):
        return self.hi


class PmDist(Distribution):
    """Posterior-mean distribution attached to a reference prior.

    ``signal`` optionally records a monotone partition that induces the
    distribution, which lets the simulator draw qualities from the prior and
    map them to posterior means.
    """

    def __init__(self, reference, knots=(), cvals=(), locs=(), masses=(), signal=None):
        super().__init__(knots, cvals, locs, masses, lo=reference.lo, hi=reference.hi)
        self.reference = reference
        self.signal = signal


@dataclass(frozen=True)
class PartitionSignal:
    """Monotone partition of ``[lo, hi]`` into cells ``(edges[i], edges[i+1]]``.

    A pooled cell reports its conditional mean; a revealed cell reports the
    quality itself.
    """

    edges: tuple
    pooled: tuple
    pooled_means: tuple

    def posterior_mean(self, theta):
        theta = np.asarray(theta, dtype=float)
        inner = np.asarray(self.edges[1:-1])
        cell = np.searchsorted(inner, theta, side="left")
        pooled = np.asarray(self.pooled)[cell]
        means = np.asarray(self.pooled_means)[cell]
        return np.where(pooled, means, theta)


# -- constructors -----------------------------------------------------------

def uniform(lo, hi):
    return Prior([lo, hi], [0.0, 1.0])


def linear_density(lo, hi, slope, n_knots=PROJECTION_KNOTS):
    """Truncated linear density ``1/(hi-lo) + slope*(theta - mid)`` projected on a grid.

    The CDF is quadratic; it is sampled exactly at ``n_knots`` equispaced
    knots and interpolated linearly.  The sup-norm projection error (attained
    at segment midpoints) is stored on the result.
    """
    lo, hi = float(lo), float(hi)
    width = hi - lo
    mid = (lo + hi) / 2.0
    base = 1.0 / width
    if base - abs(slope) * width / 2.0 < 0:
        raise DistributionError("density would be negative on the support")

    def exact(x):
        return base * (x - lo) + slope * ((x - mid) ** 2 - (lo - mid) ** 2) / 2.0

    xs = np.linspace(lo, hi, n_knots)
    mids = (xs[:-1] + xs[1:]) / 2.0
    err = float(np.max(np.abs(exact(mids) - (exact(xs[:-1]) + exact(xs[1:])) / 2.0)))
    full = base - abs(slope) * width / 2.0 > 0
    return Prior(xs, exact(xs), full_support=full, projection_error=err)


def from_partition(prior, edges, pooled):
    """Posterior-mean distribution of a monotone partition signal.

    ``edges`` runs from ``prior.lo`` to ``prior.hi``; cell ``i`` is
    ``(edges[i], edges[i+1]]`` and is pooled into one atom at its conditional
    mean when ``pooled[i]`` is true, otherwise revealed.
    """
    edges = np.asarray(edges, dtype=float)
    pooled = tuple(bool(p) for p in pooled)
    if edges.size != len(pooled) + 1:
        raise DistributionError("need one pooled flag per cell")
    if abs(edges[0] - prior.lo) > 1e-15 or abs(edges[-1] - prior.hi) > 1e-15:
        raise DistributionError("partition must span the prior support")
    if np.any(np.diff(edges) <= 0):
        raise DistributionError("partition edges must be strictly increasing")
    edges = edges.copy()
    edges[0], edges[-1] = prior.lo, prior.hi

    fe = prior.cdf(edges)
    pe = prior.partial_below(edges)
    locs, masses, means = [], [], []
    for i, is_pooled in enumerate(pooled):
        mass = fe[i + 1] - fe[i]
        if is_pooled:
            if mass <= 0:
                raise UndefinedConditionalError("pooled cell carries no mass")
            mu = (pe[i + 1] - pe[i]) / mass
            mu = min(max(mu, edges[i]), edges[i + 1])
            locs.append(mu)
            masses.append(mass)
            means.append(mu)
        else:
            means.append(np.nan)

    knots, cvals = (), ()
    if not all(pooled):
        grid = np.union1d(prior.knots, edges)
        cell_of = np.searchsorted(edges[1:-1], grid, side="left")
        revealed = ~np.asarray(pooled)
        # revealed mass at or below each grid point
        seg_mass = np.diff(prior.cdf(grid))
        seg_cell = cell_of[1:]
        cont = np.concatenate([[0.0], np.cumsum(np.where(revealed[seg_cell], seg_mass, 0.0))])
        knots, cvals = grid, cont
    signal = PartitionSignal(tuple(float(e) for e in edges), pooled, tuple(means))
    return PmDist(prior, knots, cvals, locs, masses, signal=signal)


def as_pmdist(d):
    """View a prior as a posterior-mean distribution of itself (full revelation)."""
    if isinstance(d, PmDist):
        return d
    if isinstance(d, Prior):
        return full_info(d)
    raise TypeError(f"expected Prior or PmDist, got {type(d).__name__}")


def reference_of(d):
    return d if isinstance(d, Prior) else d.reference


# -- operations --------------------------------------------------------------

def mean(d):
    return d.mean()


def _check_domain(d, x, closed_right=True):
    x = np.asarray(x, dtype=float)
    ref = reference_of(d) if isinstance(d, (Prior, PmDist)) else d
    lo, hi = ref.lo, ref.hi
    bad = (x < lo) | (x > hi) if closed_right else (x < lo) | (x >= hi)
    if np.any(bad):
        raise DomainError(f"x outside [{lo:g}, {hi:g}{']' if closed_right else ')'}")


def incremental_benefit(d, x):
    """``c(x) = int_x^hi (1 - G(m)) dm`` on the support interval."""
    _check_domain(d, x)
    return d.expected_excess(x)


def right_derivative_cb(d, x):
    """Right derivative of ``c`` at ``x``: ``G(x) - 1``."""
    _check_domain(d, x, closed_right=False)
    return d.cdf(x) - 1.0


def conditional_mean_below(d, x):
    mass = d.cdf(x)
    if mass <= 0:
        raise UndefinedConditionalError(f"P(m <= {x!r}) is zero")
    return float(d.partial_below(x) / mass)


def conditional_mean_above(d, x):
    mass = 1.0 - d.cdf(x)
    if mass <= 0:
        raise UndefinedConditionalError(f"P(m > {x!r}) is zero")
    return float((d.mean() - d.partial_below(x)) / mass)


@dataclass(frozen=True)
class MpcReport:
    ok: bool
    max_violation: float
    at: float
    endpoint_gap: float

    def __bool__(self):
        return self.ok


def mpc_grid(g, f, refinement=MPC_REFINEMENT):
    """Validation grid for ``is_mpc``.

    Union of both breakpoint sets, an equispaced refinement, and the
    stationary points of ``c_g - c_f`` inside each interval: between
    breakpoints the difference is quadratic with derivative ``G - F``, which
    is linear there, so the extrema are located exactly.
    """
    lo = min(g.lo, f.lo)
    hi = max(g.hi, f.hi)
    base = np.union1d(np.union1d(g.breakpoints(), f.breakpoints()),
                      np.linspace(lo, hi, refinement))
    base = base[(base >= lo) & (base <= hi)]
    a, b = base[:-1], base[1:]
    da = g.cdf(a) - f.cdf(a)
    db = g.cdf_left(b) - f.cdf_left(b)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = da / (da - db)
    ok = np.isfinite(t) & (t > 0) & (t < 1)
    extra = a[ok] + t[ok] * (b[ok] - a[ok])
    return np.union1d(base, extra)


def is_mpc(g, f, tol=MPC_TOL):
    """Check that ``g`` is a mean-preserving contraction of ``f``.

    ``c_g <= c_f + tol`` on the validation grid and ``c_g(lo) = c_f(lo)``.
    """
    grid = mpc_grid(g, f)
    diff = g.expected_excess(grid) - f.expected_excess(grid)
    i = int(np.argmax(diff))
    lo = min(g.lo, f.lo)
    gap = abs(g.expected_excess(lo) - f.expected_excess(lo))
    worst = float(diff[i])
    return MpcReport(ok=bool(worst <= tol and gap <= tol), max_violation=max(worst, 0.0),
                     at=float(grid[i]), endpoint_gap=float(gap))


def uninformative(f):
    return from_partition(f, [f.lo, f.hi], [True])


def full_info(f):
    return from_partition(f, [f.lo, f.hi], [False])


def _check_cutoff(f, x):
    if not f.lo < x < f.hi:
        raise DegenerateCutoffError(f"cutoff {x!r} not strictly inside ({f.lo:g}, {f.hi:g})")


def binary_split(f, x):
    """Pass/fail signal: pool ``theta <= x`` and ``theta > x`` separately."""
    _check_cutoff(f, x)
    return from_partition(f, [f.lo, x, f.hi], [True, True])


def lower_censorship(f, x):
    """Pool ``theta <= x`` into one atom, reveal the quality above ``x``."""
    _check_cutoff(f, x)
    return from_partition(f, [f.lo, x, f.hi], [True, False])


def pass_fail(f, x):
    """Binary split that degrades gracefully at the support boundary.

    A cutoff at or above ``hi`` fails everything and one at or below ``lo``
    passes everything; both are the uninformative signal.
    """
    if x >= f.hi or x <= f.lo:
        return uninformative(f)
    return binary_split(f, x)


# -- literals ----------------------------------------------------------------

def from_literal(obj, reference=None, full_support=True):
    """Build a distribution from a JSON-style literal.

    Accepted kinds: ``uniform`` (lo, hi), ``pwl`` (knots ``[[x, F(x)], ...]``),
    ``linear_density`` (lo, hi, slope) and ``mixed`` (atoms plus an optional
    ``pwl`` sub-CDF; needs a reference prior).
    """
    kind = obj.get("kind")
    if kind == "uniform":
        return uniform(obj["lo"], obj["hi"])
    if kind == "pwl":
        pts = np.asarray(obj["knots"], dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise DistributionError("pwl knots must be [[x, F(x)], ...]")
        return Prior(pts[:, 0], pts[:, 1], full_support=full_support)
    if kind == "linear_density":
        return linear_density(obj["lo"], obj["hi"], obj["slope"],
                              obj.get("n_knots", PROJECTION_KNOTS))
    if kind == "mixed":
        if reference is None:
            raise DistributionError("a mixed distribution needs a reference prior")
        atoms = np.asarray(obj.get("atoms", []), dtype=float).reshape(-1, 2)
        pts = np.asarray(obj.get("pwl", []), dtype=float).reshape(-1, 2)
        return PmDist(reference, pts[:, 0], pts[:, 1], atoms[:, 0], atoms[:, 1])
    raise DistributionError(f"unknown distribution kind {kind!r}")


def to_literal(d):
    """Inverse of ``from_literal`` for priors and posterior-mean distributions."""
    if isinstance(d, Prior):
        return {"kind": "pwl", "knots": [[float(x), float(v)] for x, v in zip(d.knots, d.cvals)]}
    return {
        "kind": "mixed",
        "atoms": [[float(x), float(m)] for x, m in zip(d.locs, d.masses)],
        "pwl": [[float(x), float(v)] for x, v in zip(d.knots, d.cvals)],
    }
