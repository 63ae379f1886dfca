"""Reference environments and public-signal models, as config literals."""

from __future__ import annotations

UNIFORM = {"kind": "uniform", "lo": 0.0, "hi": 1.0}
DELTA = 2.0 / 3.0


def half_split():
    """Public signal that reveals whether quality is above or below 0.5."""
    return {"outcomes": [
        {"label": "l", "weight": 0.5, "interim": {"kind": "uniform", "lo": 0.0, "hi": 0.5}},
        {"label": "h", "weight": 0.5, "interim": {"kind": "uniform", "lo": 0.5, "hi": 1.0}},
    ]}


def reveal_interval(lo=0.35, hi=0.45):
    """Outcome 'a' reveals that quality lies in [lo, hi]; 'b' is the rest of [0, 1]."""
    w = hi - lo
    rest = 1.0 - w
    return {"outcomes": [
        {"label": "a", "weight": w, "interim": {"kind": "uniform", "lo": lo, "hi": hi}},
        {"label": "b", "weight": rest, "interim": {"kind": "pwl", "knots": [
            [0.0, 0.0], [lo, lo / rest], [hi, lo / rest], [1.0, 1.0]]}},
    ]}


def singleton(prior=UNIFORM):
    return {"outcomes": [{"label": "all", "weight": 1.0, "interim": dict(prior)}]}


def config(prior=UNIFORM, delta=DELTA, public_signal=None, **sections):
    cfg = {"environment": {"prior": dict(prior), "delta": delta}}
    if public_signal is not None:
        cfg["public_signal"] = public_signal
    cfg.update(sections)
    return cfg
