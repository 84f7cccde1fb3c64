"""Run configuration: a YAML document validated against a fixed key schema.

Every section is optional except ``field``; unknown keys anywhere are errors.
``DEFAULTS`` doubles as the documentation printed by ``--print-defaults``.
"""

from __future__ import annotations

import copy
import os

import yaml

from .errors import ConfigError
from .field import C1, C2PLUS, CATALOG, load_sampled_csv, make_field
from .tolerances import DEFAULT, Tolerances

DEFAULTS = {
    "field": {"name": "saddle", "params": {}, "sampled": None},
    "seed": 0,
    "workers": 1,
    "tolerances": DEFAULT.as_dict(),
    "eval": {"point": {"x": [2.0, 0.0], "t": 1.0}, "points": None},
    "terminate": {
        "y0": [[1.0, 0.0]],
        "random_y0": None,
        "T_max": 10.0,
        "P": None,
        "output": None,
    },
    "spectrum": {"y0": [1.0, 0.0], "t_samples": [0.0, 0.25, 0.5, 0.75, 0.9], "T_max": 10.0},
    "classify": {"points": [{"x": [2.0, 0.0], "t": 1.0}]},
    "map": {
        "grid": {"lo": [-2.0, -2.0], "hi": [2.0, 2.0], "t_min": 0.05, "t_max": 2.0,
                 "res": [64, 64], "nt": 32},
        "strata": ["Sigma", "T1"],
        "adjacency": "faces+diagonals",
        "smoothness_orders": [],
        "output_dir": "map_out",
        "pgm": True,
    },
}

# sub-schemas for values that are themselves mappings
NESTED = {
    ("field", "sampled"): {"path": None, "smoothness": C1},
    ("terminate", "random_y0"): {"count": 10, "lo": [-2.0, -2.0], "hi": [2.0, 2.0]},
    ("eval", "point"): {"x": None, "t": None},
    ("map", "grid"): DEFAULTS["map"]["grid"],
}
FREE = {("field", "params")}


def defaults_yaml() -> str:
    return yaml.safe_dump(DEFAULTS, sort_keys=False, default_flow_style=None)


def _check_keys(data, schema, path=()):
    if not isinstance(data, dict):
        raise ConfigError(f"{'.'.join(path) or 'config'} must be a mapping")
    for k, v in data.items():
        here = path + (k,)
        if k not in schema:
            raise ConfigError(f"unknown key {'.'.join(here)!r}")
        if here in FREE or v is None:
            continue
        sub = NESTED.get(here, schema[k])
        if isinstance(sub, dict):
            _check_keys(v, sub, here)


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k not in ("params",):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def load_config(path=None, text=None) -> dict:
    if path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as e:
            raise ConfigError(f"cannot read config {path!r}: {e}") from None
    data = {}
    if text:
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"invalid YAML: {e}") from None
    _check_keys(data, DEFAULTS)
    base = copy.deepcopy(DEFAULTS)
    # a user-specified field replaces the default one entirely
    if "field" in data:
        base["field"] = {"name": None, "params": {}, "sampled": None}
    cfg = _merge(base, data)
    if cfg["eval"].get("points") is not None and "point" not in data.get("eval", {}):
        cfg["eval"]["point"] = None
    return cfg


def build_tolerances(cfg) -> Tolerances:
    try:
        return Tolerances(**{**DEFAULT.as_dict(), **(cfg.get("tolerances") or {})})
    except (TypeError, ValueError) as e:
        raise ConfigError(f"tolerances: {e}") from None


def build_field(cfg):
    spec = cfg["field"]
    sampled = spec.get("sampled")
    if sampled:
        p = sampled.get("path")
        sm = sampled.get("smoothness", C1)
        if sm not in (C1, C2PLUS):
            raise ConfigError(f"field.sampled.smoothness must be {C1} or {C2PLUS}")
        if not p or not os.path.exists(p):
            raise ConfigError(f"field.sampled.path {p!r} does not exist")
        try:
            return load_sampled_csv(p, sm)
        except ValueError as e:
            raise ConfigError(str(e)) from None
    name = spec.get("name")
    if name not in CATALOG:
        raise ConfigError(f"field.name {name!r} is not in the catalog {sorted(CATALOG)}")
    try:
        return make_field(name, **(spec.get("params") or {}))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"field.params: {e}") from None


def ensure_writable_dir(d):
    try:
        os.makedirs(d, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"cannot create output directory {d!r}: {e}") from None
    if not os.access(d, os.W_OK):
        raise ConfigError(f"output directory {d!r} is not writable")
