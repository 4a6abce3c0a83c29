"""Versioned JSON configuration for the command-line workflows."""

import json
from dataclasses import dataclass, field

from .defects import DEFECT_KINDS, STUCK_MODES
from .experiments import (
    BASELINE_TRAINING,
    CORRECTOR_TRAINING,
    DEFAULT_CORRECTOR,
    DEFAULT_SEEDS,
)
from .mlp import ARCHITECTURE_LADDER

CONFIG_FORMAT = "experiment-config/1"

EXPERIMENTS = ("same_defect", "cross_defect", "layer_sweep", "ladder")

_TRAINING_KEYS = set(CORRECTOR_TRAINING) | set(BASELINE_TRAINING)


class ConfigError(Exception):
    """Malformed or inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    experiment: str = None
    kinds: tuple = tuple(DEFECT_KINDS)
    test_kinds: tuple = None
    corrector: str = DEFAULT_CORRECTOR
    architectures: tuple = None
    pairs: tuple = None
    stuck_mode: str = "stuck_off"
    read_voltage: float = 1.0
    seeds: dict = field(default_factory=lambda: dict(DEFAULT_SEEDS))
    output_dir: str = "runs"
    max_restarts: int = 5
    baseline_training: dict = field(default_factory=dict)
    corrector_training: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment is not None and self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}"
            )
        self.kinds = tuple(self.kinds)
        for kind in self.kinds:
            if kind not in DEFECT_KINDS:
                raise ConfigError(f"unknown defect kind: {kind!r}")
        if self.test_kinds is not None:
            self.test_kinds = tuple(self.test_kinds)
            for kind in self.test_kinds:
                if kind not in DEFECT_KINDS:
                    raise ConfigError(f"unknown defect kind: {kind!r}")
        if self.corrector not in ARCHITECTURE_LADDER:
            raise ConfigError(
                f"corrector must come from the architecture ladder, got {self.corrector!r}"
            )
        if self.architectures is not None:
            self.architectures = tuple(self.architectures)
            for name in self.architectures:
                if name not in ARCHITECTURE_LADDER:
                    raise ConfigError(f"unknown architecture: {name!r}")
        if self.pairs is not None:
            pairs = []
            for pair in self.pairs:
                pair = tuple(pair)
                if len(pair) != 2 or any(k not in DEFECT_KINDS for k in pair):
                    raise ConfigError(f"bad train/test pair: {pair!r}")
                pairs.append(pair)
            self.pairs = tuple(pairs)
        if self.stuck_mode not in STUCK_MODES:
            raise ConfigError(f"stuck_mode must be one of {STUCK_MODES}")
        if not self.read_voltage > 0:
            raise ConfigError("read_voltage must be positive")
        seeds = dict(DEFAULT_SEEDS)
        for key, value in dict(self.seeds).items():
            if key not in DEFAULT_SEEDS:
                raise ConfigError(f"unknown seed name: {key!r}")
            if not isinstance(value, int):
                raise ConfigError(f"seed {key!r} must be an integer")
            seeds[key] = value
        self.seeds = seeds
        if not isinstance(self.max_restarts, int) or self.max_restarts < 1:
            raise ConfigError("max_restarts must be a positive integer")
        for name, table in (
            ("baseline_training", self.baseline_training),
            ("corrector_training", self.corrector_training),
        ):
            unknown = set(table) - _TRAINING_KEYS
            if unknown:
                raise ConfigError(f"{name} has unknown keys: {sorted(unknown)}")

    def to_dict(self):
        return {
            "format": CONFIG_FORMAT,
            "experiment": self.experiment,
            "kinds": list(self.kinds),
            "test_kinds": list(self.test_kinds) if self.test_kinds else None,
            "corrector": self.corrector,
            "architectures": list(self.architectures) if self.architectures else None,
            "pairs": [list(p) for p in self.pairs] if self.pairs else None,
            "stuck_mode": self.stuck_mode,
            "read_voltage": self.read_voltage,
            "seeds": dict(self.seeds),
            "output_dir": self.output_dir,
            "max_restarts": self.max_restarts,
            "baseline_training": dict(self.baseline_training),
            "corrector_training": dict(self.corrector_training),
        }

    @classmethod
    def from_dict(cls, payload):
        data = dict(payload)
        fmt = data.pop("format", CONFIG_FORMAT)
        if fmt != CONFIG_FORMAT:
            raise ConfigError(f"unsupported config format: {fmt!r}")
        known = {
            "experiment", "kinds", "test_kinds", "corrector", "architectures",
            "pairs", "stuck_mode", "read_voltage", "seeds", "output_dir",
            "max_restarts", "baseline_training", "corrector_training",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {k: v for k, v in data.items() if v is not None}
        return cls(**kwargs)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError("config root must be a JSON object")
    return ExperimentConfig.from_dict(payload)


def save_config(config, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")
