"""Scenario configuration: defaults, YAML files, and dotted overrides.

Every knob lives in one dataclass tree so the CLI, the server, and tests
agree on names. Validation reports the full field path on error.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional, get_type_hints

import yaml


class ConfigError(Exception):
    """Bad configuration; message carries the offending field path."""


@dataclass
class FlyerConfig:
    start_gap_m: float = 0.5
    start_speed_mm_s: float = 0.0
    start_lateral_m: float = 0.0
    start_misalign_deg: float = 0.0


@dataclass
class ControlConfig:
    kp: float = 0.5
    kd: float = 2.5
    kp_ang: float = 0.8
    kd_ang: float = 2.0
    # Commanding a waypoint behind the surface sets the terminal closing
    # speed, roughly kp/kd times the depth.
    waypoint_depth_m: float = 0.15


@dataclass
class SensorConfig:
    noise_mm: float = 1.0


@dataclass
class AdhesionConfig:
    quality: float = 0.27
    shear_preload_n: float = 10.0


@dataclass
class GripperConfig:
    grasp_delay_ms: int = 250
    auto: bool = True


@dataclass
class ScenarioConfig:
    seed: int = 0
    duration_s: float = 60.0
    tick_ms: int = 50
    experiment_id: int = 1
    sd_dir: Optional[str] = None
    flyer: FlyerConfig = field(default_factory=FlyerConfig)
    control: ControlConfig = field(default_factory=ControlConfig)
    sensor: SensorConfig = field(default_factory=SensorConfig)
    adhesion: AdhesionConfig = field(default_factory=AdhesionConfig)
    gripper: GripperConfig = field(default_factory=GripperConfig)


def _coerce(value: Any, target_type: type, path: str) -> Any:
    if target_type is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected number, got {value!r}")
        return float(value)
    if target_type is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected integer, got {value!r}")
        return value
    if target_type is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true/false, got {value!r}")
        return value
    return value


def _build(cls, data: Dict[str, Any], path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected mapping, got {data!r}")
    # get_type_hints resolves the stringified annotations to real classes
    hints = get_type_hints(cls)
    known = {f.name for f in fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(f"{path + '.' if path else ''}{key}: unknown field")
    kwargs = {}
    for name in known:
        if name not in data:
            continue
        sub_path = f"{path + '.' if path else ''}{name}"
        value = data[name]
        hint = hints[name]
        if dataclasses.is_dataclass(hint):
            kwargs[name] = _build(hint, value, sub_path)
        elif name == "sd_dir":
            if value is not None and not isinstance(value, str):
                raise ConfigError(f"{sub_path}: expected string path or null")
            kwargs[name] = value
        else:
            kwargs[name] = _coerce(value, hint, sub_path)
    return cls(**kwargs)


def config_from_dict(data: Dict[str, Any]) -> ScenarioConfig:
    return _build(ScenarioConfig, data or {}, "")


def config_to_dict(cfg: ScenarioConfig) -> Dict[str, Any]:
    return dataclasses.asdict(cfg)


def load_config(path: Optional[str] = None) -> ScenarioConfig:
    if path is None:
        return ScenarioConfig()
    with open(path, "r") as fh:
        data = yaml.safe_load(fh)
    if data is None:
        data = {}
    return config_from_dict(data)


def apply_overrides(cfg: ScenarioConfig, pairs: List[str]) -> ScenarioConfig:
    """Apply key=value strings like control.kp=0.7 on top of a config."""
    data = config_to_dict(cfg)
    for raw in pairs:
        if "=" not in raw:
            raise ConfigError(f"override {raw!r}: expected key=value")
        key, _, text = raw.partition("=")
        try:
            value = yaml.safe_load(text)
        except yaml.YAMLError:
            raise ConfigError(f"override {key}: unparseable value {text!r}")
        node = data
        parts = key.split(".")
        for part in parts[:-1]:
            if not isinstance(node.get(part), dict):
                raise ConfigError(f"override {key}: no such section {part!r}")
            node = node[part]
        if parts[-1] not in node:
            raise ConfigError(f"override {key}: unknown field")
        node[parts[-1]] = value
    return config_from_dict(data)
