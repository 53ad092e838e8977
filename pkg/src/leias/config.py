"""Scenario configuration: JSON schema, parsing, and validation.

Canonical keys: "waypoints", "tick_hz", "thresholds" {"t1","t2","t3"},
"error_schedule" {"gps","lidar","imu"}, "pilot_model", "selection_policy",
"response_window_s", "seed". Remaining keys are optional engine knobs with
defaults filled in at load.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from . import agent
from .model import (
    ConfigError,
    EmptyRouteError,
    ErrorSchedule,
    FixedError,
    NoError,
    NonIntegralDeadlineError,
    Position,
    RampError,
    RandomUniformError,
    RangeThresholds,
    SensorKind,
    validate_schedule,
)

DEFAULT_THRESHOLDS = RangeThresholds(3.0, 9.0, 15.0)


@dataclass(frozen=True)
class PilotModelSpec:
    kind: str  # "table" | "threshold" | "silent" | "console"
    params: dict = field(default_factory=dict)

    @property
    def scripted(self) -> bool:
        return self.kind in ("table", "threshold")


@dataclass(frozen=True)
class ScenarioConfig:
    waypoints: tuple[Position, ...]
    tick_hz: float
    thresholds: RangeThresholds
    error_schedule: dict[SensorKind, ErrorSchedule]
    pilot_model: PilotModelSpec
    selection_policy: agent.SelectionPolicy
    response_window_s: float
    seed: int
    ground_speed: float = 1.0  # map units per second
    altitude_ft: float = 1000.0
    airspeed_kn: float = 100.0
    learning_rate: float = agent.DEFAULT_LEARNING_RATE
    autonomous_switching: bool = True
    switch_requires_error_below_t3: bool = False
    max_ticks: int = 1000

    @property
    def window_ticks(self) -> int:
        return int(round(self.response_window_s * self.tick_hz))

    def to_json_dict(self) -> dict:
        return {
            "waypoints": [[w.x, w.y] for w in self.waypoints],
            "tick_hz": self.tick_hz,
            "thresholds": {
                "t1": self.thresholds.t1,
                "t2": self.thresholds.t2,
                "t3": self.thresholds.t3,
            },
            "error_schedule": {
                s.name.lower(): _schedule_to_json(self.error_schedule[s]) for s in SensorKind
            },
            "pilot_model": {"kind": self.pilot_model.kind, **self.pilot_model.params},
            "selection_policy": _policy_to_json(self.selection_policy),
            "response_window_s": self.response_window_s,
            "seed": self.seed,
            "ground_speed": self.ground_speed,
            "altitude_ft": self.altitude_ft,
            "airspeed_kn": self.airspeed_kn,
            "learning_rate": self.learning_rate,
            "autonomous_switching": self.autonomous_switching,
            "switch_requires_error_below_t3": self.switch_requires_error_below_t3,
            "max_ticks": self.max_ticks,
        }


def _schedule_to_json(s: ErrorSchedule) -> dict:
    if isinstance(s, NoError):
        return {"kind": "none"}
    if isinstance(s, RandomUniformError):
        return {"kind": "random_uniform", "max_magnitude": s.max_magnitude}
    if isinstance(s, RampError):
        return {
            "kind": "ramp",
            "start_tick": s.start_tick,
            "rate_per_tick": s.rate_per_tick,
            "cap": s.cap,
        }
    if isinstance(s, FixedError):
        return {
            "kind": "fixed",
            "magnitude": s.magnitude,
            "start_tick": s.start_tick,
            "end_tick": s.end_tick,
        }
    raise ConfigError(f"unknown schedule: {s!r}")


def _schedule_from_json(data: dict) -> ErrorSchedule:
    kind = data.get("kind", "none")
    if kind == "none":
        return NoError()
    if kind == "random_uniform":
        return RandomUniformError(float(data["max_magnitude"]))
    if kind == "ramp":
        return RampError(int(data["start_tick"]), float(data["rate_per_tick"]), float(data["cap"]))
    if kind == "fixed":
        return FixedError(float(data["magnitude"]), int(data["start_tick"]), int(data["end_tick"]))
    raise ConfigError(f"unknown error schedule kind: {kind!r}")


def _policy_to_json(p: agent.SelectionPolicy) -> dict:
    if isinstance(p, agent.BoltzmannFixed):
        return {"kind": "boltzmann_fixed", "temperature": p.temperature}
    return {"kind": "annealing", "t0": p.t0, "decay": p.decay, "floor": p.floor}


def _policy_from_json(data: dict) -> agent.SelectionPolicy:
    kind = data.get("kind", "annealing")
    if kind == "boltzmann_fixed":
        return agent.BoltzmannFixed(float(data.get("temperature", agent.DEFAULT_HIGH_TEMPERATURE)))
    if kind == "annealing":
        return agent.Annealing(
            float(data.get("t0", agent.DEFAULT_ANNEAL_T0)),
            float(data.get("decay", agent.DEFAULT_ANNEAL_DECAY)),
            float(data.get("floor", agent.DEFAULT_ANNEAL_FLOOR)),
        )
    raise ConfigError(f"unknown selection policy kind: {kind!r}")


def policy_from_flag(flag: str) -> agent.SelectionPolicy:
    """Parse a CLI policy flag: 'fixed:<tau>' or 'anneal'."""
    if flag == "anneal":
        return agent.Annealing(
            agent.DEFAULT_ANNEAL_T0, agent.DEFAULT_ANNEAL_DECAY, agent.DEFAULT_ANNEAL_FLOOR
        )
    if flag.startswith("fixed:"):
        return agent.BoltzmannFixed(float(flag.split(":", 1)[1]))
    raise ConfigError(f"unknown policy flag: {flag!r} (expected 'fixed:<tau>' or 'anneal')")


def config_from_json_dict(data: dict) -> ScenarioConfig:
    try:
        waypoints = tuple(Position(float(x), float(y)) for x, y in data["waypoints"])
        th = data.get("thresholds", {})
        thresholds = RangeThresholds(
            float(th.get("t1", DEFAULT_THRESHOLDS.t1)),
            float(th.get("t2", DEFAULT_THRESHOLDS.t2)),
            float(th.get("t3", DEFAULT_THRESHOLDS.t3)),
        )
        sched_raw = data.get("error_schedule", {})
        schedule = {
            s: _schedule_from_json(sched_raw.get(s.name.lower(), {"kind": "none"}))
            for s in SensorKind
        }
        pm_raw = dict(data.get("pilot_model", {"kind": "silent"}))
        pilot_model = PilotModelSpec(pm_raw.pop("kind"), pm_raw)
        cfg = ScenarioConfig(
            waypoints=waypoints,
            tick_hz=float(data.get("tick_hz", 1.0)),
            thresholds=thresholds,
            error_schedule=schedule,
            pilot_model=pilot_model,
            selection_policy=_policy_from_json(data.get("selection_policy", {})),
            response_window_s=float(data.get("response_window_s", 5.0)),
            seed=int(data.get("seed", 0)),
            ground_speed=float(data.get("ground_speed", 1.0)),
            altitude_ft=float(data.get("altitude_ft", 1000.0)),
            airspeed_kn=float(data.get("airspeed_kn", 100.0)),
            learning_rate=float(data.get("learning_rate", agent.DEFAULT_LEARNING_RATE)),
            autonomous_switching=bool(data.get("autonomous_switching", True)),
            switch_requires_error_below_t3=bool(
                data.get("switch_requires_error_below_t3", False)
            ),
            max_ticks=int(data.get("max_ticks", 1000)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed scenario config: {exc}") from exc
    return validate_config(cfg)


def validate_config(cfg: ScenarioConfig) -> ScenarioConfig:
    """Return the config unchanged iff every invariant holds."""
    if len(cfg.waypoints) < 1:
        raise EmptyRouteError("scenario needs at least one waypoint")
    for w in cfg.waypoints:
        if not (math.isfinite(w.x) and math.isfinite(w.y)):
            raise ConfigError(f"waypoint components must be finite: {w}")
    if not (math.isfinite(cfg.tick_hz) and cfg.tick_hz > 0):
        raise ConfigError(f"tick_hz must be > 0: {cfg.tick_hz}")
    cfg.thresholds.validate()
    for s in SensorKind:
        validate_schedule(cfg.error_schedule[s])
    if cfg.pilot_model.kind not in ("table", "threshold", "silent", "console"):
        raise ConfigError(f"unknown pilot model kind: {cfg.pilot_model.kind!r}")
    try:
        cfg.selection_policy.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.response_window_s <= 0:
        raise ConfigError(f"response_window_s must be > 0: {cfg.response_window_s}")
    deadline = cfg.response_window_s * cfg.tick_hz
    if abs(deadline - round(deadline)) > 1e-9 or round(deadline) < 1:
        raise NonIntegralDeadlineError(
            f"response window of {deadline} ticks is not a positive whole number"
        )
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer: {cfg.seed}")
    if not 0 < cfg.learning_rate <= 1:
        raise ConfigError(f"learning_rate must be in (0, 1]: {cfg.learning_rate}")
    if cfg.ground_speed <= 0:
        raise ConfigError(f"ground_speed must be > 0: {cfg.ground_speed}")
    if cfg.altitude_ft < 0 or cfg.airspeed_kn < 0:
        raise ConfigError("altitude_ft and airspeed_kn must be >= 0")
    if cfg.max_ticks < 1:
        raise ConfigError(f"max_ticks must be >= 1: {cfg.max_ticks}")
    return cfg


def load_config(path: str | Path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return config_from_json_dict(json.load(fh))


def with_overrides(cfg: ScenarioConfig, **kwargs: Any) -> ScenarioConfig:
    return validate_config(replace(cfg, **kwargs))
