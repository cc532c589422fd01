"""Experiment configuration files.

A config is a YAML mapping with ``schema: 1``::

    schema: 1
    name: gnp-connectivity
    claim: P(connected) -> exp(-exp(-c)) for np = log n + c
    model:
      family: gnp
      params: {n: 4096, p: "=(log(n) + c) / n"}
    sweep: {param: c, grid: [-1, 0, 1]}
    trials: 10000
    seed: 1
    observables: [connected, n_components]
    expected:
      trend: {column: connected, direction: increasing}
      values: {connected: "=exp(-exp(-c))"}
      tolerance: 0.04
    output: results/gnp-connectivity
    workers: 1

String parameters starting with ``=`` are arithmetic expressions over the
other parameters and the sweep variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from rsclab.harness import observables as obs
from rsclab.models.registry import ModelSpec

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    name: str
    model: ModelSpec
    param: str
    grid: list
    trials: int
    seed: int
    observables: list
    output: str | None = None
    workers: int = 1
    claim: str = ""
    expected: dict = field(default_factory=dict)
    schema: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.schema != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema {self.schema}; this version reads schema {SCHEMA_VERSION}")
        if not self.grid:
            raise ConfigError("sweep grid must be nonempty")
        if int(self.trials) < 1:
            raise ConfigError("trials must be at least 1")
        if not self.observables:
            raise ConfigError("at least one observable is required")
        for entry in self.observables:
            try:
                obs.parse(entry)
            except (ValueError, KeyError) as exc:
                raise ConfigError(str(exc)) from None
        self.trials = int(self.trials)
        self.seed = int(self.seed)
        self.workers = max(1, int(self.workers))

    def point_spec(self, value) -> ModelSpec:
        return self.model.with_params(**{self.param: value})

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": self.schema,
            "name": self.name,
            "claim": self.claim,
            "model": {"family": self.model.family, "params": dict(self.model.params)},
            "sweep": {"param": self.param, "grid": list(self.grid)},
            "trials": self.trials,
            "seed": self.seed,
            "observables": list(self.observables),
            "expected": dict(self.expected),
            "output": self.output,
            "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        if "schema" not in data:
            raise ConfigError("config needs a 'schema' key")
        try:
            model = data["model"]
            sweep = data["sweep"]
            return cls(
                name=str(data["name"]),
                model=ModelSpec(model["family"], model.get("params", {})),
                param=str(sweep["param"]),
                grid=list(sweep["grid"]),
                trials=data["trials"],
                seed=data["seed"],
                observables=list(data["observables"]),
                output=data.get("output"),
                workers=data.get("workers", 1),
                claim=str(data.get("claim", "")),
                expected=dict(data.get("expected") or {}),
                schema=int(data["schema"]),
            )
        except KeyError as exc:
            raise ConfigError(f"missing config key {exc}") from None

    @classmethod
    def from_yaml(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(yaml.safe_load(text))

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_yaml(Path(path).read_text(encoding="utf-8"))

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def shipped_dir() -> Path:
    return Path(__file__).resolve().parent.parent / "experiments"


def shipped_configs() -> dict[str, Path]:
    return {p.stem: p for p in sorted(shipped_dir().glob("*.yaml"))}
