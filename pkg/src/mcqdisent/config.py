"""Run configuration: a YAML file with a fixed schema.

Unknown keys are rejected at every level. Example::

    scene: {a: 1.0, R_A: 4.0, R_B: 2.0, M: 5, d: inf, seed: 7}
    time_grid: {t_max: 4.0, unit: tau_e, n_steps: 400}
    models: [exact, gaussian]
    measures: [bm, chsh, bprv]
    outputs: out
"""

from __future__ import annotations

import copy
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import yaml

from mcqdisent.constants import PhysicalConstants
from mcqdisent.dynamics import MODELS, STATE_VECTOR_CAP
from mcqdisent.errors import ConfigError
from mcqdisent.geometry import INFINITE, SceneConfig
from mcqdisent.measures import MEASURES
from mcqdisent.spectra import DOUBLE_FLIP, ENUMERATION_CAP, SOURCES


@dataclass(frozen=True)
class TimeGrid:
    t_max: float = 4.0
    unit: str = "tau_e"  # or "fs"
    n_steps: int = 400

    def __post_init__(self):
        if self.unit not in ("tau_e", "fs"):
            raise ConfigError(f"time_grid.unit must be 'tau_e' or 'fs', got {self.unit!r}")
        if not self.t_max > 0:
            raise ConfigError("time_grid.t_max must be positive")
        if int(self.n_steps) != self.n_steps or self.n_steps < 2:
            raise ConfigError("time_grid.n_steps must be an integer >= 2")


@dataclass(frozen=True)
class EnsembleOptions:
    n_runs: int = 10
    radius_ratios: tuple[float, ...] = (2.0, 1.0, 0.5)
    measure: str = "bm"
    threshold: float = 1.0

    def __post_init__(self):
        if self.n_runs < 1:
            raise ConfigError("ensemble.n_runs must be >= 1")
        if self.measure not in MEASURES:
            raise ConfigError(f"ensemble.measure must be one of {MEASURES}")
        if not self.radius_ratios or any(not r > 0 for r in self.radius_ratios):
            raise ConfigError("ensemble.radius_ratios must be positive")


@dataclass(frozen=True)
class ScatterOptions:
    ratios: tuple[float, ...] = (2.0, 1.0, 0.5)
    n_per_ratio: int = 50

    def __post_init__(self):
        if self.n_per_ratio < 1:
            raise ConfigError("scatter.n_per_ratio must be >= 1")
        if not self.ratios or any(not r > 0 for r in self.ratios):
            raise ConfigError("scatter.ratios must be positive")


@dataclass(frozen=True)
class HistogramOptions:
    n_bins: int | None = None
    source: str = DOUBLE_FLIP

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ConfigError(f"histogram.source must be one of {SOURCES}")
        if self.n_bins is not None and self.n_bins < 1:
            raise ConfigError("histogram.n_bins must be >= 1")


@dataclass(frozen=True)
class LinearizeOptions:
    window: float = 0.25  # in units of tau_E
    diagnostic: str = "none"  # or "exponential"

    def __post_init__(self):
        if self.diagnostic not in ("none", "exponential"):
            raise ConfigError("linearize.diagnostic must be 'none' or 'exponential'")
        if not self.window > 0:
            raise ConfigError("linearize.window must be positive")


@dataclass(frozen=True)
class Caps:
    state_vector: int = STATE_VECTOR_CAP
    enumeration: int = ENUMERATION_CAP


@dataclass(frozen=True)
class RunConfig:
    scene: SceneConfig = field(default_factory=SceneConfig)
    time_grid: TimeGrid = field(default_factory=TimeGrid)
    models: tuple[str, ...] = ("exact", "gaussian")
    measures: tuple[str, ...] = MEASURES
    outputs: str = "out"
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    ensemble: EnsembleOptions = field(default_factory=EnsembleOptions)
    scatter: ScatterOptions = field(default_factory=ScatterOptions)
    histogram: HistogramOptions = field(default_factory=HistogramOptions)
    linearize: LinearizeOptions = field(default_factory=LinearizeOptions)
    caps: Caps = field(default_factory=Caps)
    threads: int = 1
    plots: bool = False

    def __post_init__(self):
        if not self.models:
            raise ConfigError("models: select at least one model")
        for m in self.models:
            if m not in MODELS:
                raise ConfigError(f"models: unknown model {m!r}; expected a subset of {MODELS}")
        for m in self.measures:
            if m not in MEASURES:
                raise ConfigError(f"measures: unknown measure {m!r}; expected a subset of {MEASURES}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")


_SECTIONS = {
    "scene": SceneConfig,
    "time_grid": TimeGrid,
    "constants": PhysicalConstants,
    "ensemble": EnsembleOptions,
    "scatter": ScatterOptions,
    "histogram": HistogramOptions,
    "linearize": LinearizeOptions,
    "caps": Caps,
}
_TUPLE_FIELDS = {"radius_ratios", "ratios"}


def _coerce(section: str, key: str, value):
    if key == "d" and isinstance(value, str):
        if value.lower() in ("inf", "infinite", "infinity"):
            return INFINITE
        raise ConfigError(f"{section}.d must be a number or 'inf'")
    if key in _TUPLE_FIELDS:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{section}.{key} must be a list")
        return tuple(float(v) for v in value)
    return value


def _build(section: str, cls, data):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{section} must be a mapping")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"{section}: unknown field(s) {unknown}; allowed {sorted(known)}")
    kwargs = {k: _coerce(section, k, v) for k, v in data.items()}
    try:
        return cls(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"{section}: {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}: {exc}") from None


def config_from_dict(data: dict | None) -> RunConfig:
    data = dict(data or {})
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown top-level field(s) {unknown}; allowed {sorted(known)}")
    kwargs = {}
    for key, value in data.items():
        if key in _SECTIONS:
            kwargs[key] = _build(key, _SECTIONS[key], value)
        elif key in ("models", "measures"):
            if isinstance(value, str):
                value = [v.strip() for v in value.split(",") if v.strip()]
            kwargs[key] = tuple(value)
        else:
            kwargs[key] = value
    return RunConfig(**kwargs)


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        data = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    return config_from_dict(data)


def config_to_dict(cfg: RunConfig) -> dict:
    """Plain-data echo of a config; round-trips through :func:`config_from_dict`."""
    d = asdict(cfg)
    d = copy.deepcopy(d)
    if d["scene"]["d"] == INFINITE:
        d["scene"]["d"] = "inf"
    for key in ("models", "measures"):
        d[key] = list(d[key])
    d["ensemble"]["radius_ratios"] = list(d["ensemble"]["radius_ratios"])
    d["scatter"]["ratios"] = list(d["scatter"]["ratios"])
    return d


def dump_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=True)


def with_overrides(cfg: RunConfig, seed=None, out=None, threads=None, models=None, plots=None) -> RunConfig:
    """Apply command-line overrides."""
    if seed is not None:
        cfg = replace(cfg, scene=replace(cfg.scene, seed=int(seed)))
    if out is not None:
        cfg = replace(cfg, outputs=str(out))
    if threads is not None:
        cfg = replace(cfg, threads=int(threads))
    if models is not None:
        cfg = replace(cfg, models=tuple(m.strip() for m in models.split(",") if m.strip()))
    if plots:
        cfg = replace(cfg, plots=True)
    return cfg


def resolve_t_max(grid: TimeGrid, tau_e: float) -> float:
    """Grid end in fs."""
    if grid.unit == "fs":
        return float(grid.t_max)
    if not math.isfinite(tau_e):
        # uncoupled environment: nothing decays, read t_max as fs
        return float(grid.t_max)
    return float(grid.t_max) * tau_e
