"""Experiment configuration: presets, flat key=value files, validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .errors import ConfigError
from .profiles import (
    KINDS,
    Profile,
    constant,
    janszky_adam,
    load_tabulated,
    parametric_resonance,
    relaxing_pulse,
    sudden_jump,
)

#: Parameter sets reproducing the shipped reference workflows.
PRESETS = {
    "fig1": {"profile": "relaxing_pulse", "B": 3.0 * math.pi, "t_final": 150.0, "n_steps": 150000},
    "fig2": {"profile": "parametric_resonance", "omega_l": 1.04, "epsilon": 2.04,
             "t_final": 120.0, "n_steps": 150000},
    "fig4": {"profile": "janszky_adam", "omega1": 1.5, "t_final": 30.0, "n_steps": 60000},
    "fig5": {"profile": "janszky_adam", "omega1": 1.04, "t_final": 120.0, "n_steps": 150000},
}


@dataclass
class ExperimentConfig:
    profile: str = "constant"
    omega0: float = 1.0
    B: float | None = None
    epsilon: float | None = None
    omega_l: float | None = None
    omega1: float | None = None
    hold_low: float | None = None
    hold_high: float | None = None
    table: str | None = None
    t_final: float = 30.0
    n_steps: int | str = "auto"
    tol: float = 1e-5
    n_start: int = 10000
    lam: float = 0.0
    scaling: str = "quarter"
    record_every: int | str = "auto"
    rule: str = "right"
    output: str = "trajectory.csv"
    format: str = "csv"
    oracle_check: bool = False
    oracle_dim: int | None = None
    oracle_dt_sub: float | None = None
    preset: str | None = None
    fingerprint: bool = False

    def validate(self) -> "ExperimentConfig":
        if self.profile not in KINDS:
            raise ConfigError(f"unknown profile {self.profile!r}; choose from {', '.join(KINDS)}")
        if not (self.omega0 > 0):
            raise ConfigError(f"omega0 must be positive, got {self.omega0}")
        if not (self.t_final > 0):
            raise ConfigError(f"t_final must be positive, got {self.t_final}")
        if isinstance(self.n_steps, str):
            if self.n_steps != "auto":
                raise ConfigError(f"n_steps must be an integer or 'auto', got {self.n_steps!r}")
        elif self.n_steps < 1:
            raise ConfigError(f"n_steps must be >= 1, got {self.n_steps}")
        if isinstance(self.record_every, str):
            if self.record_every != "auto":
                raise ConfigError(f"record_every must be an integer or 'auto', got {self.record_every!r}")
        elif self.record_every < 1:
            raise ConfigError(f"record_every must be >= 1, got {self.record_every}")
        if not (self.tol > 0):
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if self.scaling not in ("half", "quarter"):
            raise ConfigError(f"scaling must be 'half' or 'quarter', got {self.scaling!r}")
        if self.rule not in ("right", "midpoint"):
            raise ConfigError(f"rule must be 'right' or 'midpoint', got {self.rule!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be 'csv' or 'json', got {self.format!r}")
        required = {
            "relaxing_pulse": ("B",),
            "parametric_resonance": ("epsilon", "omega_l"),
            "janszky_adam": ("omega1",),
            "sudden_jump": ("omega1",),
            "tabulated": ("table",),
        }.get(self.profile, ())
        for name in required:
            if getattr(self, name) is None:
                raise ConfigError(f"profile {self.profile!r} needs parameter {name!r}")
        return self

    def to_profile(self) -> Profile:
        try:
            if self.profile == "constant":
                return constant(self.omega0)
            if self.profile == "relaxing_pulse":
                return relaxing_pulse(self.B, self.omega0)
            if self.profile == "parametric_resonance":
                return parametric_resonance(self.epsilon, self.omega_l, self.omega0)
            if self.profile == "janszky_adam":
                return janszky_adam(self.omega1, self.omega0,
                                    hold_high=self.hold_high, hold_low=self.hold_low)
            if self.profile == "sudden_jump":
                return sudden_jump(self.omega1, self.omega0)
            if self.profile == "tabulated":
                return load_tabulated(self.table, omega0=None if self.omega0 == 1.0 else self.omega0)
        except (ValueError, OSError) as exc:
            raise ConfigError(str(exc)) from exc
        raise ConfigError(f"unknown profile {self.profile!r}")


_FIELD_NAMES = {f.name for f in fields(ExperimentConfig)}
_INT_OR_AUTO = ("n_steps", "record_every")
_BOOL_FIELDS = ("oracle_check", "fingerprint")


def _coerce(key: str, raw: str):
    value = raw.strip()
    if key in _BOOL_FIELDS:
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"cannot parse boolean {key} = {raw!r}")
    if key in _INT_OR_AUTO and value == "auto":
        return "auto"
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            continue
    return value


def load_config_file(path) -> dict:
    """Parse a flat ``key = value`` file; '#' starts a comment."""
    out = {}
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    with fh:
        for lineno, rawline in enumerate(fh, 1):
            line = rawline.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, _, raw = line.partition("=")
            key = key.strip()
            if key == "lambda":  # file alias for the quadrature angle
                key = "lam"
            if key not in _FIELD_NAMES:
                raise ConfigError(f"{path}:{lineno}: unknown configuration key {key!r}")
            out[key] = _coerce(key, raw)
    return out


def build_config(preset: str | None = None, config_file: str | None = None,
                 overrides: dict | None = None) -> ExperimentConfig:
    """Layer preset < config file < explicit overrides into a validated config."""
    layered: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(sorted(PRESETS))}")
        layered.update(PRESETS[preset])
        layered["preset"] = preset
    if config_file is not None:
        file_values = load_config_file(config_file)
        if "preset" in file_values:
            inner = file_values.pop("preset")
            if inner not in PRESETS:
                raise ConfigError(f"unknown preset {inner!r} in {config_file}")
            merged = dict(PRESETS[inner])
            merged.update(layered)
            layered = merged
            layered["preset"] = inner
        layered.update(file_values)
    for key, value in (overrides or {}).items():
        if value is not None:
            layered[key] = value
    unknown = set(layered) - _FIELD_NAMES
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    try:
        cfg = ExperimentConfig(**layered)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()
