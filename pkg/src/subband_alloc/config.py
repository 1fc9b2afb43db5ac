"""Run configuration: scenario presets, a YAML config file with layered
overrides, and provenance recording for every output directory."""

import dataclasses
import hashlib
import json
import os

import yaml

from .channel import PROFILES, ChannelProfile, NoiseModel
from .deploy import ScenarioConfig
from .ggnn import GgnnConfig, TrainerConfig


class ConfigError(Exception):
    pass


# Scenario presets: Default is the dense factory floor; Scenario1 a larger
# sparse-clutter factory; Scenario2 a less dense indoor-office deployment.
SCENARIOS = {
    "Default": ScenarioConfig(area_width_m=40.0, area_height_m=25.0,
                              n_subnetworks=50, channel_profile="InF-DL"),
    "Scenario1": ScenarioConfig(area_width_m=50.0, area_height_m=30.0,
                                n_subnetworks=80, channel_profile="InF-SL"),
    "Scenario2": ScenarioConfig(area_width_m=25.0, area_height_m=25.0,
                                n_subnetworks=20, channel_profile="InH-Office"),
}

# named RNG sub-streams so one component's draws never shift another's
STREAMS = {"deploy": 0, "channel": 1, "init": 2, "train": 3, "eval": 4, "bench": 5}


def default_config() -> dict:
    """Full-scale defaults; desk-scale runs override trainer/eval blocks."""
    return {
        "master_seed": 0,
        "output_dir": "runs/out",
        "workers": None,  # null = available cores
        "scenario": "Default",
        "scenario_overrides": {},
        "noise": dataclasses.asdict(NoiseModel()),
        "model": dataclasses.asdict(GgnnConfig()),
        "trainer": dataclasses.asdict(TrainerConfig()),
        "eval": {"n_snapshots": 10_000, "allocators": ["ra", "cgc", "sisa", "ggnn"]},
        "bench": {"n_list": list(range(50, 201, 10)), "reps": 20, "warmup": 3},
        # all dB/meter constants explicit and auditable
        "channel_profiles": {name: dataclasses.asdict(p) for name, p in PROFILES.items()},
    }


def _deep_update(base, override):
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], value)
        else:
            base[key] = value
    return base


def load_run_config(path=None, overrides=None) -> dict:
    """Resolve defaults <- config file <- explicit overrides."""
    cfg = default_config()
    if path is not None:
        try:
            with open(path) as f:
                loaded = yaml.safe_load(f)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: {exc}")
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        _deep_update(cfg, loaded)
    if overrides:
        _deep_update(cfg, {k: v for k, v in overrides.items() if v is not None})
    return cfg


def _build(cls, block, name):
    try:
        return cls(**block)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid '{name}' block: {exc}")


def scenario_from_config(cfg: dict, name=None) -> ScenarioConfig:
    name = name or cfg["scenario"]
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; valid: {sorted(SCENARIOS)}")
    base = dataclasses.asdict(SCENARIOS[name])
    _deep_update(base, cfg.get("scenario_overrides", {}))
    return _build(ScenarioConfig, base, "scenario")


def noise_from_config(cfg: dict) -> NoiseModel:
    return _build(NoiseModel, cfg["noise"], "noise")


def ggnn_config_from_config(cfg: dict) -> GgnnConfig:
    block = dict(cfg["model"])
    block.setdefault("n_subbands", cfg["noise"]["n_subbands"])
    return _build(GgnnConfig, block, "model")


def trainer_config_from_config(cfg: dict) -> TrainerConfig:
    return _build(TrainerConfig, cfg["trainer"], "trainer")


def apply_channel_profiles(cfg: dict) -> None:
    """Materialize (possibly overridden) profile constants into the registry."""
    for name, block in cfg.get("channel_profiles", {}).items():
        PROFILES[name] = _build(ChannelProfile, block, f"channel_profiles.{name}")


def stream_seed(master_seed: int, stream: str, index: int = 0) -> int:
    import numpy as np
    return int(np.random.SeedSequence(
        [int(master_seed), STREAMS[stream], int(index)]).generate_state(1)[0])


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_provenance(out_dir, resolved_cfg: dict, inputs: dict = None) -> None:
    """Drop the resolved config and content hashes next to the outputs."""
    os.makedirs(out_dir, exist_ok=True)
    cfg_path = os.path.join(out_dir, "resolved_config.yaml")
    with open(cfg_path, "w") as f:
        yaml.safe_dump(resolved_cfg, f, sort_keys=True)
    record = {"resolved_config_sha256": _sha256(cfg_path), "inputs": {}}
    for name, path in (inputs or {}).items():
        record["inputs"][name] = {"path": str(path), "sha256": _sha256(path)}
    with open(os.path.join(out_dir, "provenance.json"), "w") as f:
        json.dump(record, f, indent=2, sort_keys=True)
