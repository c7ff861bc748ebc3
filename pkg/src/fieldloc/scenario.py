"""Scenario configuration: one JSON document drives the whole pipeline."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence, Union

from .fields import BigClouds, BooleanClouds, FieldModel, RandomWalkers
from .rng import MAX_SEED

FIELD_KINDS = {
    "boolean_clouds": BooleanClouds,
    "big_clouds": BigClouds,
    "walkers": RandomWalkers,
}


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the field."""


BeaconSpecConfig = Union[str, Sequence[tuple[float, float]]]


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int
    n_sensors: int
    field: FieldModel
    beacons: BeaconSpecConfig = "corners"
    n_steps: int = 2000
    knn_exponent: float = 1.2
    lag_window: int = 0
    output_dir: str = "out"

    def __post_init__(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
            raise ConfigError(f"seed: must be an unsigned 64-bit integer, got {self.seed!r}")
        if not isinstance(self.n_sensors, int) or self.n_sensors < 1:
            raise ConfigError(f"n_sensors: must be a positive integer, got {self.n_sensors!r}")
        if not isinstance(self.n_steps, int) or self.n_steps < 1:
            raise ConfigError(f"n_steps: must be a positive integer, got {self.n_steps!r}")
        if not float(self.knn_exponent) > 1.0:
            raise ConfigError(f"knn_exponent: must be > 1, got {self.knn_exponent!r}")
        if not isinstance(self.lag_window, int) or self.lag_window < 0:
            raise ConfigError(f"lag_window: must be a non-negative integer, got {self.lag_window!r}")
        if not isinstance(self.beacons, str):
            coords = list(self.beacons)
            for c in coords:
                if len(c) != 2:
                    raise ConfigError(f"beacons: expected coordinate pairs, got {c!r}")
            object.__setattr__(self, "beacons", tuple((float(x), float(y)) for x, y in coords))
        elif self.beacons != "corners":
            raise ConfigError(f"beacons: expected 'corners' or a coordinate list, got {self.beacons!r}")


def _field_to_dict(model: FieldModel) -> dict[str, Any]:
    for kind, cls in FIELD_KINDS.items():
        if isinstance(model, cls):
            out: dict[str, Any] = {"kind": kind}
            out.update({k: getattr(model, k) for k in model.__dataclass_fields__})
            return out
    raise ConfigError(f"field: unknown model {type(model).__name__}")


def _field_from_dict(data: dict[str, Any]) -> FieldModel:
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError("field: expected an object with a 'kind' key")
    kind = data["kind"]
    cls = FIELD_KINDS.get(kind)
    if cls is None:
        raise ConfigError(f"field.kind: unknown kind {kind!r}; expected one of {sorted(FIELD_KINDS)}")
    kwargs = {k: v for k, v in data.items() if k != "kind"}
    allowed = set(cls.__dataclass_fields__)
    unknown = set(kwargs) - allowed
    if unknown:
        raise ConfigError(f"field: unknown parameter(s) {sorted(unknown)} for kind {kind!r}")
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field: {exc}") from exc


def config_to_dict(config: ScenarioConfig) -> dict[str, Any]:
    return {
        "seed": config.seed,
        "n_sensors": config.n_sensors,
        "beacons": config.beacons if isinstance(config.beacons, str) else [list(c) for c in config.beacons],
        "field": _field_to_dict(config.field),
        "n_steps": config.n_steps,
        "knn_exponent": config.knn_exponent,
        "lag_window": config.lag_window,
        "output_dir": config.output_dir,
    }


def config_from_dict(data: dict[str, Any]) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("config: expected a JSON object")
    required = ("seed", "n_sensors", "field")
    for key in required:
        if key not in data:
            raise ConfigError(f"{key}: missing required field")
    known = {"seed", "n_sensors", "beacons", "field", "n_steps", "knn_exponent", "lag_window", "output_dir"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"config: unknown field(s) {sorted(unknown)}")
    beacons = data.get("beacons", "corners")
    if isinstance(beacons, list):
        beacons = tuple(tuple(c) for c in beacons)
    try:
        return ScenarioConfig(
            seed=data["seed"],
            n_sensors=data["n_sensors"],
            field=_field_from_dict(data["field"]),
            beacons=beacons,
            n_steps=data.get("n_steps", 2000),
            knn_exponent=data.get("knn_exponent", 1.2),
            lag_window=data.get("lag_window", 0),
            output_dir=data.get("output_dir", "out"),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from exc
    return config_from_dict(data)


def save_config(config: ScenarioConfig, path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2) + "\n")
