"""Run configuration: JSON document parsing with strict key checking."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields

from .errors import ConfigError
from .rmo import RmoParams
from .scenario import ScenarioConfig, config_from_dict, config_to_dict

METHODS = ("mm", "rmo", "mbnb")


@dataclass(frozen=True)
class MmConfig:
    tol: float = 1e-6
    max_iter: int = 500
    shift_method: str = "gershgorin"

    def __post_init__(self):
        if self.tol <= 0.0:
            raise ConfigError("mm.tol must be > 0")
        if self.max_iter < 1:
            raise ConfigError("mm.max_iter must be >= 1")
        if self.shift_method not in ("gershgorin", "power"):
            raise ConfigError("mm.shift_method must be 'gershgorin' or 'power'")


@dataclass(frozen=True)
class MbnbConfig:
    eps: float | None = None  # None: 1e-3 of the local surrogate magnitude
    max_nodes: int = 20_000
    outer_iters: int = 50
    tol: float = 1e-8
    polish_iters: int = 6
    descent_iters: int = 300
    restart_candidates: int = 48
    exploration_starts: int = 24

    def __post_init__(self):
        if self.eps is not None and self.eps <= 0.0:
            raise ConfigError("mbnb.eps must be > 0 when given")
        if self.max_nodes < 1:
            raise ConfigError("mbnb.max_nodes must be >= 1")
        if self.outer_iters < 1:
            raise ConfigError("mbnb.outer_iters must be >= 1")


@dataclass(frozen=True)
class BeampatternConfig:
    desired_angles: tuple = (-0.5, 0.5)
    rho_schedule: tuple = (1.0, 10.0, 100.0, 1000.0)
    max_inner: int = 500

    def __post_init__(self):
        if not self.desired_angles:
            raise ConfigError("beampattern.desired_angles must be nonempty")
        object.__setattr__(self, "desired_angles", tuple(float(a) for a in self.desired_angles))
        object.__setattr__(self, "rho_schedule", tuple(float(r) for r in self.rho_schedule))


@dataclass(frozen=True)
class SweepConfig:
    alphas: tuple = (0.99, 0.9, 0.5, 0.1, 0.01)
    trials: int = 50

    def __post_init__(self):
        if not self.alphas:
            raise ConfigError("sweep.alphas must be nonempty")
        for a in self.alphas:
            if not 0.0 <= a <= 1.0:
                raise ConfigError(f"sweep.alphas entry {a} outside [0, 1]")
        if self.trials < 1:
            raise ConfigError("sweep.trials must be >= 1")
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))


@dataclass(frozen=True)
class BenchConfig:
    n_list: tuple = (16, 36, 64, 100)
    trials: int = 5
    methods: tuple = ("mm", "rmo")

    def __post_init__(self):
        if not self.n_list:
            raise ConfigError("bench.n_list must be nonempty")
        if list(self.n_list) != sorted(self.n_list):
            raise ConfigError("bench.n_list must be sorted ascending")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"bench.methods entry {m!r} is not one of {METHODS}")
        if self.trials < 1:
            raise ConfigError("bench.trials must be >= 1")
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "methods", tuple(self.methods))


@dataclass(frozen=True)
class OracleConfig:
    k_levels: int = 64
    trials: int = 5

    def __post_init__(self):
        if self.k_levels < 8:
            raise ConfigError("oracle.k_levels must be >= 8")
        if self.trials < 1:
            raise ConfigError("oracle.trials must be >= 1")


@dataclass(frozen=True)
class OutputConfig:
    path: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise ConfigError("output.format must be 'csv' or 'json'")


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    method: str = "mm"
    alpha: float = 0.9
    outer_tol: float = 1e-5
    outer_max_iter: int = 100
    beampattern_mode: bool = False
    mm: MmConfig = field(default_factory=MmConfig)
    rmo: RmoParams = field(default_factory=RmoParams)
    mbnb: MbnbConfig = field(default_factory=MbnbConfig)
    beampattern: BeampatternConfig = field(default_factory=BeampatternConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    bench: BenchConfig = field(default_factory=BenchConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.outer_tol <= 0.0:
            raise ConfigError("outer_tol must be > 0")
        if self.outer_max_iter < 1:
            raise ConfigError("outer_max_iter must be >= 1")


_SECTIONS = {
    "mm": MmConfig,
    "rmo": RmoParams,
    "mbnb": MbnbConfig,
    "beampattern": BeampatternConfig,
    "sweep": SweepConfig,
    "bench": BenchConfig,
    "oracle": OracleConfig,
    "output": OutputConfig,
}

_SEQUENCE_FIELDS = {"desired_angles", "rho_schedule", "alphas", "n_list", "methods"}


def _build_section(cls, name: str, d: dict):
    known = {f.name for f in fields(cls)}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown key(s) in '{name}': {sorted(unknown)}")
    kwargs = {}
    for key, value in d.items():
        kwargs[key] = tuple(value) if key in _SEQUENCE_FIELDS and isinstance(value, list) else value
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid '{name}' section: {e}") from e


def parse_config_dict(d: dict) -> RunConfig:
    if not isinstance(d, dict):
        raise ConfigError("configuration document must be a JSON object")
    top_known = {f.name for f in fields(RunConfig)}
    unknown = set(d) - top_known
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {sorted(unknown)}")
    kwargs = {}
    if "scenario" in d:
        kwargs["scenario"] = config_from_dict(d["scenario"])
    for name, cls in _SECTIONS.items():
        if name in d:
            kwargs[name] = _build_section(cls, name, d[name])
    for name in ("method", "alpha", "outer_tol", "outer_max_iter", "beampattern_mode"):
        if name in d:
            kwargs[name] = d[name]
    return RunConfig(**kwargs)


def parse_config(path) -> RunConfig:
    """Load and validate a JSON run configuration."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            document = json.load(fh)
    except FileNotFoundError as e:
        raise ConfigError(f"configuration file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    return parse_config_dict(document)


def run_config_to_dict(cfg: RunConfig) -> dict:
    """Inverse of parse_config_dict (lists in place of tuples)."""

    def plain(obj):
        out = {}
        for f in fields(obj):
            value = getattr(obj, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out

    d = {
        "scenario": config_to_dict(cfg.scenario),
        "method": cfg.method,
        "alpha": cfg.alpha,
        "outer_tol": cfg.outer_tol,
        "outer_max_iter": cfg.outer_max_iter,
        "beampattern_mode": cfg.beampattern_mode,
    }
    for name in _SECTIONS:
        d[name] = plain(getattr(cfg, name))
    return d
