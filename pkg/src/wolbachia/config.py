"""Run configuration files.

A run config is an INI document with up to three sections:

    [params]   b_I b_U delta_I delta_U d_I d_U sigma_I sigma_U
    [sim]      dt horizon I0 U0 seed truncation_base clip_negative record_stride
    [analysis] burn_in bins

Keys are case-sensitive and spelled exactly as above; unknown sections
or keys are rejected by name.  Missing keys take the documented
defaults: the standard rate table (b_I=0.45, b_U=0.55, delta_I=0.05,
delta_U=0.048, d_I=d_U=0.001), zero noise, dt=1e-4, horizon=600,
initial (100, 500), seed 0, truncation_base=600, clipping on,
record_stride=100, burn_in=0.1, bins=100.

The environment variable WOLBACHIA_SEED, when set, overrides the seed.
"""

from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass
from typing import Mapping

from .model import ModelParams, State
from .sde import SimConfig


class ConfigError(ValueError):
    """Malformed run config; the message names the offending part."""


DEFAULTS: dict[str, dict[str, object]] = {
    "params": {
        "b_I": 0.45,
        "b_U": 0.55,
        "delta_I": 0.05,
        "delta_U": 0.048,
        "d_I": 0.001,
        "d_U": 0.001,
        "sigma_I": 0.0,
        "sigma_U": 0.0,
    },
    "sim": {
        "dt": 1e-4,
        "horizon": 600.0,
        "I0": 100.0,
        "U0": 500.0,
        "seed": 0,
        "truncation_base": 600.0,
        "clip_negative": True,
        "record_stride": 100,
    },
    "analysis": {
        "burn_in": 0.1,
        "bins": 100,
    },
}

_INT_KEYS = {"seed", "record_stride", "bins"}
_BOOL_KEYS = {"clip_negative"}

_BOOLEAN_STATES = {
    "1": True, "yes": True, "true": True, "on": True,
    "0": False, "no": False, "false": False, "off": False,
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration."""

    params: ModelParams
    sim: SimConfig
    burn_in: float
    bins: int
    resolved: Mapping[str, Mapping[str, object]]


def _parse_value(section: str, key: str, text: str) -> object:
    if key in _BOOL_KEYS:
        state = _BOOLEAN_STATES.get(text.strip().lower())
        if state is None:
            raise ConfigError(f"[{section}] {key}: expected a boolean, got {text!r}")
        return state
    if key in _INT_KEYS:
        try:
            return int(text)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: expected an integer, got {text!r}") from None
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"[{section}] {key}: must be finite, got {text!r}")
    return value


def _validate(resolved: dict[str, dict[str, object]]) -> None:
    p = resolved["params"]
    for key in ("b_I", "b_U", "delta_I", "delta_U", "sigma_I", "sigma_U"):
        if p[key] < 0:
            raise ConfigError(f"{key} must be >= 0, got {p[key]!r}")
    for key in ("d_I", "d_U"):
        if p[key] <= 0:
            raise ConfigError(f"{key} must be > 0, got {p[key]!r}")
    s = resolved["sim"]
    for key in ("dt", "horizon"):
        if s[key] <= 0:
            raise ConfigError(f"{key} must be > 0, got {s[key]!r}")
    for key in ("I0", "U0", "truncation_base"):
        if s[key] < 0:
            raise ConfigError(f"{key} must be >= 0, got {s[key]!r}")
    if s["seed"] < 0:
        raise ConfigError(f"seed must be >= 0, got {s['seed']!r}")
    if s["record_stride"] < 1:
        raise ConfigError(f"record_stride must be >= 1, got {s['record_stride']!r}")
    a = resolved["analysis"]
    if not 0.0 <= a["burn_in"] < 1.0:
        raise ConfigError(f"burn_in must be in [0, 1), got {a['burn_in']!r}")
    if a["bins"] < 1:
        raise ConfigError(f"bins must be >= 1, got {a['bins']!r}")


def load_run_config(path: str | None = None, env: Mapping[str, str] | None = None) -> RunConfig:
    """Parse a config file (or use pure defaults when path is None).

    Raises ConfigError naming the first unknown section, unknown key,
    unparsable value, or constraint violation encountered.
    """
    resolved = {section: dict(values) for section, values in DEFAULTS.items()}
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str  # keys are case-sensitive
        try:
            with open(path, "r", encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as err:
            raise ConfigError(f"cannot read config file {path}: {err}") from err
        except configparser.Error as err:
            raise ConfigError(f"malformed config file {path}: {err}") from err
        for section in parser.sections():
            if section not in resolved:
                raise ConfigError(f"unknown section [{section}]")
            for key, text in parser.items(section):
                if key not in DEFAULTS[section]:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
                resolved[section][key] = _parse_value(section, key, text)

    env = os.environ if env is None else env
    seed_text = env.get("WOLBACHIA_SEED")
    if seed_text is not None:
        try:
            resolved["sim"]["seed"] = int(seed_text)
        except ValueError:
            raise ConfigError(
                f"WOLBACHIA_SEED: expected an integer, got {seed_text!r}"
            ) from None

    _validate(resolved)
    p, s, a = resolved["params"], resolved["sim"], resolved["analysis"]
    params = ModelParams(
        b_i=p["b_I"], b_u=p["b_U"], delta_i=p["delta_I"], delta_u=p["delta_U"],
        d_i=p["d_I"], d_u=p["d_U"], sigma_i=p["sigma_I"], sigma_u=p["sigma_U"],
    )
    sim = SimConfig(
        horizon=s["horizon"],
        initial=State(s["I0"], s["U0"]),
        seed=s["seed"],
        dt=s["dt"],
        truncation_base=s["truncation_base"],
        clip_negative=s["clip_negative"],
        record_stride=s["record_stride"],
    )
    return RunConfig(params, sim, a["burn_in"], a["bins"], resolved)
