"""Run configuration: JSON schema, validation and object construction."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import jsonschema

from .dist import DistributionError, from_literal
from .public import PublicSignalModel
from .search import Environment

_NUM = {"type": "number"}
_KNOTS = {"type": "array", "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}}

DIST_SCHEMA = {
    "oneOf": [
        {"type": "object", "additionalProperties": False, "required": ["kind", "lo", "hi"],
         "properties": {"kind": {"const": "uniform"}, "lo": _NUM, "hi": _NUM}},
        {"type": "object", "additionalProperties": False, "required": ["kind", "knots"],
         "properties": {"kind": {"const": "pwl"}, "knots": {**_KNOTS, "minItems": 2}}},
        {"type": "object", "additionalProperties": False, "required": ["kind", "lo", "hi", "slope"],
         "properties": {"kind": {"const": "linear_density"}, "lo": _NUM, "hi": _NUM, "slope": _NUM,
                        "n_knots": {"type": "integer", "minimum": 2}}},
        {"type": "object", "additionalProperties": False, "required": ["kind"],
         "properties": {"kind": {"const": "mixed"}, "atoms": _KNOTS, "pwl": _KNOTS}},
    ]
}

PRIOR_SCHEMA = {"oneOf": DIST_SCHEMA["oneOf"][:3]}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["environment"],
    "properties": {
        "environment": {
            "type": "object", "additionalProperties": False, "required": ["prior", "delta"],
            "properties": {
                "prior": PRIOR_SCHEMA,
                "delta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            },
        },
        "public_signal": {
            "type": "object", "additionalProperties": False, "required": ["outcomes"],
            "properties": {
                "outcomes": {
                    "type": "array", "minItems": 1,
                    "items": {
                        "type": "object", "additionalProperties": False,
                        "required": ["label", "weight", "interim"],
                        "properties": {"label": {"type": "string"}, "weight": _NUM,
                                       "interim": DIST_SCHEMA},
                    },
                },
            },
        },
        "solver": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "grid_size": {"type": "integer", "minimum": 16},
                "curve_points": {"type": "integer", "minimum": 2},
                "phi_points": {"type": "integer", "minimum": 2},
            },
        },
        "simulation": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "horizon": {"type": "integer", "minimum": 1},
            },
        },
        "output_dir": {"type": "string"},
    },
}

CONTRACT_SCHEMA = {
    "type": "object", "additionalProperties": False, "required": ["price", "dist"],
    "properties": {
        "price": {"oneOf": [{"type": "number", "minimum": 0}, {"const": "equilibrium"}]},
        "dist": {
            "oneOf": DIST_SCHEMA["oneOf"] + [
                {"type": "object", "additionalProperties": False, "required": ["kind", "cutoff"],
                 "properties": {"kind": {"enum": ["binary", "lower_censorship"]},
                                "cutoff": {"oneOf": [_NUM, {"enum": ["r_bar", "r_lo"]}]}}},
                {"type": "object", "additionalProperties": False, "required": ["kind"],
                 "properties": {"kind": {"enum": ["full_info", "uninformative"]}}},
            ]
        },
    },
}


class ConfigError(ValueError):
    """Config or contract file failed to parse or validate."""


@dataclass
class RunConfig:
    environment: Environment
    grid_size: int = 4096
    curve_points: int = 512
    phi_points: int = 256
    n: int = 100_000
    seed: int = 0
    horizon: int = 10_000
    output_dir: str = "."
    raw: dict = field(default_factory=dict, repr=False)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def validate(obj, schema=CONFIG_SCHEMA):
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"schema error at {where}: {exc.message}") from exc


def parse_config(obj):
    """Validate a config mapping and build the run objects.

    The public-signal model is parsed lazily by the caller (``public_model``)
    so that model violations can be told apart from schema errors.
    """
    validate(obj)
    env_obj = obj["environment"]
    try:
        prior = from_literal(env_obj["prior"])
        env = Environment(prior, float(env_obj["delta"]))
    except (DistributionError, ValueError) as exc:
        raise ConfigError(f"environment: {exc}") from exc
    solver = obj.get("solver", {})
    simc = obj.get("simulation", {})
    seed = simc.get("seed", 0)
    if os.environ.get("PS_SEED"):
        try:
            seed = int(os.environ["PS_SEED"])
        except ValueError as exc:
            raise ConfigError(f"PS_SEED must be an integer: {exc}") from exc
    return RunConfig(
        environment=env,
        grid_size=solver.get("grid_size", 4096),
        curve_points=solver.get("curve_points", 512),
        phi_points=solver.get("phi_points", 256),
        n=simc.get("n", 100_000),
        seed=seed,
        horizon=simc.get("horizon", 10_000),
        output_dir=obj.get("output_dir", "."),
        raw=obj,
    )


def load_config(path):
    return parse_config(_load_json(path))


def public_model(cfg):
    """Build the public-signal model (raises ``ModelError`` on violations)."""
    lit = cfg.raw.get("public_signal")
    if lit is None:
        return None
    return PublicSignalModel.from_literal(lit)


def load_contract(path):
    obj = _load_json(path)
    validate(obj, CONTRACT_SCHEMA)
    return obj
