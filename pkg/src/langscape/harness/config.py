"""JSON experiment configs: published schema, validation, stable hashing.

A config file is a flat JSON object whose allowed keys depend on the mode.
Validation is strict: unknown keys are errors (named in the message), as
are type mismatches and missing required keys.  The config hash is the
sha256 of the canonical (sorted-key) JSON of the fully defaulted config,
so key order in the file never matters and every emitted artifact can
embed the hash of the exact settings that produced it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any

__all__ = [
    "MODES",
    "ConfigError",
    "ExperimentConfig",
    "load_json",
    "validate_config",
    "config_hash",
    "describe_schema",
]

MODES = ("landscape", "wdc", "rric", "mix", "invert", "posterior",
         "theory-check")


class ConfigError(ValueError):
    """Invalid configuration; maps to exit code 2."""


def _is_list_of(kind):
    def check(v):
        return isinstance(v, list) and len(v) > 0 and all(
            isinstance(x, kind) and not isinstance(x, bool) for x in v)
    return check


def _num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _str(v):
    return isinstance(v, str)


def _bool(v):
    return isinstance(v, bool)


_REQUIRED = object()

# key -> (predicate, human-readable type, default)
_COMMON = {
    "seed": (_int, "integer", 0),
    "svg": (_bool, "boolean", False),
}

SCHEMAS: dict[str, dict[str, tuple]] = {
    "landscape": {
        **_COMMON,
        "d": (_int, "integer", _REQUIRED),
        "n": (_int, "integer", _REQUIRED),
        "r_points": (_int, "integer", 48),
        "theta_points": (_int, "integer", 49),
        "r_max": (_num, "number", 2.5),
        "xi": (_num, "number", 10.0),
        "lam": (_num, "number", 0.1),
        "beta": (_num, "number", 1.0),
    },
    "wdc": {
        **_COMMON,
        "k": (_int, "integer", 3),
        "n_values": (_is_list_of(int), "list of integers", [256, 1024, 4096]),
        "pairs": (_int, "integer", 200),
    },
    "rric": {
        **_COMMON,
        "dims": (_is_list_of(int), "list of integers", [8, 64, 128]),
        "m_values": (_is_list_of(int), "list of integers", [16, 64, 256]),
        "tuples": (_int, "integer", 200),
    },
    "mix": {
        **_COMMON,
        "d": (_int, "integer", 2),
        "beta": (_num, "number", 40.0),
        "eta": (_num, "number", 1e-3),
        "chains": (_int, "integer", 200),
        "snapshot_steps": (_is_list_of(int), "list of integers",
                           [100, 1000, 10_000, 100_000]),
        "grid": (_int, "integer", 192),
        "projections": (_int, "integer", 128),
        "start_radius": (_num, "number", 2.0),
    },
    "invert": {
        **_COMMON,
        "dims": (_is_list_of(int), "list of integers", _REQUIRED),
        "mask_fraction": (_num, "number", 0.0075),
        "noise_sigma": (_num, "number", 0.0),
        "split_layer": (_int, "integer", 1),
        "radius": (_num, "number", _REQUIRED),
        "eta_csgm": (_num, "number", 0.05),
        "eta_ilo": (_num, "number", 0.05),
        "steps": (_int, "integer", 300),
        "runs": (_int, "integer", 20),
    },
    "posterior": {
        **_COMMON,
        "prior_weights": (_is_list_of((int, float)), "list of numbers",
                          _REQUIRED),
        "prior_means": (lambda v: _is_list_of(list)(v),
                        "list of vectors", _REQUIRED),
        "prior_variances": (_is_list_of((int, float)), "list of numbers",
                            _REQUIRED),
        "g2": (lambda v: v == "identity" or _is_list_of(list)(v),
               '"identity" or a matrix', "identity"),
        "y": (_is_list_of((int, float)), "list of numbers", _REQUIRED),
        "sigma": (_num, "number", _REQUIRED),
        "eta": (_num, "number", 0.01),
        "steps": (_int, "integer", 20_000),
        "chains": (_int, "integer", 4),
        "record_every": (_int, "integer", 10),
        "likelihood_weight": (_num, "number", 1.0),
    },
    "theory-check": {
        "seed": (_int, "integer", 0),
        "checks": (_is_list_of(str), "list of check ids", []),
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated, fully defaulted experiment description."""

    mode: str
    params: dict
    out_dir: str

    @property
    def seed(self) -> int:
        return self.params["seed"]

    def hash(self) -> str:
        return config_hash(self.mode, self.params)


def load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return raw


def validate_config(mode: str, raw: dict, seed_override: int | None = None,
                    out_dir: str = ".") -> ExperimentConfig:
    """Check keys/types against the mode schema and apply defaults."""
    if mode not in SCHEMAS:
        raise ConfigError(
            f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    schema = SCHEMAS[mode]
    for key in raw:
        if key not in schema:
            raise ConfigError(f"unknown config key {key!r} for mode {mode!r}")
    params: dict[str, Any] = {}
    for key, (pred, typename, default) in schema.items():
        if key in raw:
            value = raw[key]
            if not pred(value):
                raise ConfigError(
                    f"config key {key!r} must be {typename}, "
                    f"got {value!r}")
            params[key] = value
        elif default is _REQUIRED:
            raise ConfigError(f"missing required config key {key!r} "
                              f"for mode {mode!r}")
        else:
            params[key] = default
    if seed_override is not None:
        params["seed"] = int(seed_override)
    return ExperimentConfig(mode=mode, params=params, out_dir=out_dir)


def config_hash(mode: str, params: dict) -> str:
    """sha256 of the canonical JSON; independent of key order."""
    canon = json.dumps({"mode": mode, "params": params}, sort_keys=True,
                       separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def describe_schema(mode: str) -> str:
    """One line per allowed key: name, type, default or 'required'."""
    lines = []
    for key, (pred, typename, default) in sorted(SCHEMAS[mode].items()):
        tail = "required" if default is _REQUIRED else f"default {default!r}"
        lines.append(f"  {key}: {typename} ({tail})")
    return "\n".join(lines)
