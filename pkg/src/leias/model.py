"""Domain types shared by the simulator, the learning agent, and the trace checker.

Everything here is an immutable value type: instances can be shared freely
between the engine loop and any consumer without synchronization.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional


class ConfigError(ValueError):
    """A scenario configuration failed validation."""


class ThresholdOrderError(ConfigError):
    """Range thresholds must satisfy 0 < t1 < t2 < t3."""


class EmptyRouteError(ConfigError):
    """A scenario needs at least one waypoint."""


class NonIntegralDeadlineError(ConfigError):
    """response_window_s * tick_hz must land on a whole number of ticks."""


class SensorKind(enum.IntEnum):
    """The three position sensors. Integer order is the deterministic tie-break order."""

    GPS = 0
    LIDAR = 1
    IMU = 2


class ErrorRange(enum.IntEnum):
    """Severity band of a positional error value, ordered Normal < Level1 < Level2 < Safety."""

    NORMAL = 0
    LEVEL1 = 1
    LEVEL2 = 2
    SAFETY = 3


class PilotResponse(enum.Enum):
    AGREE = "Agree"
    DISAGREE = "Disagree"
    NEUTRAL = "Neutral"


class AlertLevel(enum.Enum):
    """The two learnable alert levels. LOW maps to Level1, HIGH to Level2."""

    LOW = "Low"
    HIGH = "High"


class AlertAction(enum.Enum):
    WARN = "Warn"
    DO_NOT_WARN = "DoNotWarn"


class DecisionLevel(enum.Enum):
    """Level attached to an alert decision.

    LOW/HIGH are the learnable levels; MANDATORY is the rule-forced warning in
    the Safety band and SUPPRESSED the rule-forced silence in the Normal band.
    """

    LOW = "Low"
    HIGH = "High"
    MANDATORY = "Mandatory"
    SUPPRESSED = "Suppressed"

    @property
    def alert_level(self) -> Optional[AlertLevel]:
        if self is DecisionLevel.LOW:
            return AlertLevel.LOW
        if self is DecisionLevel.HIGH:
            return AlertLevel.HIGH
        return None

    @property
    def learnable(self) -> bool:
        return self in (DecisionLevel.LOW, DecisionLevel.HIGH)


def decision_level_for(rng: ErrorRange) -> DecisionLevel:
    return {
        ErrorRange.NORMAL: DecisionLevel.SUPPRESSED,
        ErrorRange.LEVEL1: DecisionLevel.LOW,
        ErrorRange.LEVEL2: DecisionLevel.HIGH,
        ErrorRange.SAFETY: DecisionLevel.MANDATORY,
    }[rng]


@dataclass(frozen=True)
class Position:
    """A point in abstract map units (x east, y north)."""

    x: float
    y: float

    def distance_to(self, other: "Position") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def offset(self, dx: float, dy: float) -> "Position":
        return Position(self.x + dx, self.y + dy)


@dataclass(frozen=True)
class AircraftState:
    position: Position
    altitude: float  # feet
    airspeed: float  # knots
    heading: float  # compass degrees in [0, 360)
    waypoint_index: int


@dataclass(frozen=True)
class RangeThresholds:
    """Band boundaries in abstract error units; bands are half-open on the right.

    Normal = [0, t1), Level1 = [t1, t2), Level2 = [t2, t3), Safety = [t3, inf).
    """

    t1: float
    t2: float
    t3: float

    def validate(self) -> "RangeThresholds":
        vals = (self.t1, self.t2, self.t3)
        if not all(math.isfinite(v) for v in vals):
            raise ThresholdOrderError(f"thresholds must be finite, got {vals}")
        if not (0 < self.t1 < self.t2 < self.t3):
            raise ThresholdOrderError(f"need 0 < t1 < t2 < t3, got {vals}")
        return self


@dataclass(frozen=True)
class SensorReading:
    sensor: SensorKind
    position: Position
    tick: int


@dataclass(frozen=True)
class SensorAssessment:
    sensor: SensorKind
    error_value: float
    range: ErrorRange
    implicated: bool
    reliable: bool

    def to_json_dict(self) -> dict:
        return {
            "error_value": self.error_value,
            "range": range_name(self.range),
            "implicated": self.implicated,
            "reliable": self.reliable,
        }


_RANGE_NAMES = {
    ErrorRange.NORMAL: "Normal",
    ErrorRange.LEVEL1: "Level1",
    ErrorRange.LEVEL2: "Level2",
    ErrorRange.SAFETY: "Safety",
}
_RANGE_BY_NAME = {v: k for k, v in _RANGE_NAMES.items()}


def range_name(r: ErrorRange) -> str:
    return _RANGE_NAMES[r]


def range_from_name(name: str) -> ErrorRange:
    return _RANGE_BY_NAME[name]


@dataclass(frozen=True)
class AssessmentSet:
    """Per-tick assessments for all three sensors plus the multi-fault advisory flag."""

    gps: SensorAssessment
    lidar: SensorAssessment
    imu: SensorAssessment
    ambiguous: bool = False

    def get(self, sensor: SensorKind) -> SensorAssessment:
        return (self.gps, self.lidar, self.imu)[int(sensor)]

    def all(self) -> tuple[SensorAssessment, SensorAssessment, SensorAssessment]:
        return (self.gps, self.lidar, self.imu)

    @property
    def implicated_sensor(self) -> Optional[SensorKind]:
        for a in self.all():
            if a.implicated:
                return a.sensor
        return None


class QTable:
    """Learned action values over the 12-entry (sensor, level, action) domain.

    The domain is closed: reads and writes outside the 12 keys raise KeyError.
    Instances are immutable; updates return a new table.
    """

    DOMAIN = tuple(
        (s, l, a) for s in SensorKind for l in AlertLevel for a in AlertAction
    )

    __slots__ = ("_values",)

    def __init__(self, values: Optional[dict] = None):
        base = {k: 0.0 for k in self.DOMAIN}
        if values is not None:
            for k, v in values.items():
                if k not in base:
                    raise KeyError(f"key outside QTable domain: {k}")
                base[k] = float(v)
        self._values = base

    def value(self, sensor: SensorKind, level: AlertLevel, action: AlertAction) -> float:
        return self._values[(sensor, level, action)]

    def with_value(
        self, sensor: SensorKind, level: AlertLevel, action: AlertAction, value: float
    ) -> "QTable":
        key = (sensor, level, action)
        if key not in self._values:
            raise KeyError(f"key outside QTable domain: {key}")
        new = dict(self._values)
        new[key] = value
        return QTable(new)

    def __eq__(self, other) -> bool:
        return isinstance(other, QTable) and self._values == other._values

    def to_json_dict(self) -> dict:
        return {
            f"{s.name}.{l.value}.{a.value}": self._values[(s, l, a)]
            for (s, l, a) in self.DOMAIN
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "QTable":
        values = {}
        for key, v in data.items():
            s_name, l_name, a_name = key.split(".")
            values[(SensorKind[s_name], AlertLevel(l_name), AlertAction(a_name))] = v
        return cls(values)


# --- error-injection schedules (config data consumed by the flight simulator) ---


@dataclass(frozen=True)
class NoError:
    kind: str = field(default="none", init=False)


@dataclass(frozen=True)
class RandomUniformError:
    """A fresh error magnitude drawn uniformly from [0, max_magnitude] each tick."""

    max_magnitude: float
    kind: str = field(default="random_uniform", init=False)


@dataclass(frozen=True)
class RampError:
    """Error grows linearly from zero at start_tick, capped at cap."""

    start_tick: int
    rate_per_tick: float
    cap: float
    kind: str = field(default="ramp", init=False)


@dataclass(frozen=True)
class FixedError:
    """Constant error magnitude over [start_tick, end_tick] inclusive."""

    magnitude: float
    start_tick: int
    end_tick: int
    kind: str = field(default="fixed", init=False)


ErrorSchedule = NoError | RandomUniformError | RampError | FixedError


def validate_schedule(s: ErrorSchedule) -> ErrorSchedule:
    if isinstance(s, RandomUniformError):
        if s.max_magnitude < 0:
            raise ConfigError(f"random_uniform max_magnitude must be >= 0: {s}")
    elif isinstance(s, RampError):
        if s.rate_per_tick <= 0:
            raise ConfigError(f"ramp rate_per_tick must be > 0: {s}")
        if s.cap < 0:
            raise ConfigError(f"ramp cap must be >= 0: {s}")
    elif isinstance(s, FixedError):
        if s.magnitude < 0:
            raise ConfigError(f"fixed magnitude must be >= 0: {s}")
        if s.start_tick > s.end_tick:
            raise ConfigError(f"fixed start_tick must be <= end_tick: {s}")
    return s


@dataclass(frozen=True)
class TraceEvent:
    """One append-only record in a run trace."""

    tick: int
    kind: str
    payload: dict

    KINDS = (
        "StateSnapshot",
        "AlertOpened",
        "PilotResponded",
        "AlertResolved",
        "SensorSwitched",
        "RewardApplied",
        "PolicyUpdated",
    )
