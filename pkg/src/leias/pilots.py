"""Scripted pilots for training, testing, and fault injection, plus the
console adapter that turns queued UI input into a response.

Scripted pilots grade both Warn and DoNotWarn decisions (supervised
alignment); the live console pilot can only react to alerts it actually sees.
"""

from __future__ import annotations

from typing import Callable, Optional

from .agent import AlertDecision
from .config import PilotModelSpec
from .model import (
    AlertAction,
    AlertLevel,
    DecisionLevel,
    PilotResponse,
    SensorKind,
)

PreferenceTable = dict[tuple[SensorKind, AlertLevel], AlertAction]

# Per-sensor warning preferences used throughout training examples:
# GPS warn at Level1 only, LIDAR warn at both levels, IMU never warn.
DEFAULT_PREFERENCES: PreferenceTable = {
    (SensorKind.GPS, AlertLevel.LOW): AlertAction.WARN,
    (SensorKind.GPS, AlertLevel.HIGH): AlertAction.DO_NOT_WARN,
    (SensorKind.LIDAR, AlertLevel.LOW): AlertAction.WARN,
    (SensorKind.LIDAR, AlertLevel.HIGH): AlertAction.WARN,
    (SensorKind.IMU, AlertLevel.LOW): AlertAction.DO_NOT_WARN,
    (SensorKind.IMU, AlertLevel.HIGH): AlertAction.DO_NOT_WARN,
}


def _require_learnable(decision: AlertDecision) -> AlertLevel:
    level = decision.level.alert_level
    if level is None:
        raise ValueError(f"scripted grading applies to Low/High decisions, got {decision.level}")
    return level


def table_pilot(prefs: PreferenceTable, decision: AlertDecision) -> PilotResponse:
    """Agree iff the decision matches the preference table cell."""
    level = _require_learnable(decision)
    preferred = prefs[(decision.sensor, level)]
    return PilotResponse.AGREE if decision.action is preferred else PilotResponse.DISAGREE


def threshold_pilot(theta: float, decision: AlertDecision, error_value: float) -> PilotResponse:
    """Prefer Warn iff the error reached or exceeded theta."""
    _require_learnable(decision)
    preferred = AlertAction.WARN if error_value >= theta else AlertAction.DO_NOT_WARN
    return PilotResponse.AGREE if decision.action is preferred else PilotResponse.DISAGREE


def silent_pilot(decision: AlertDecision) -> PilotResponse:
    """The fault model: never responds."""
    return PilotResponse.NEUTRAL


def console_pilot(queued_input: Optional[PilotResponse]) -> PilotResponse:
    """Pass through the queued console response, Neutral in its absence."""
    return queued_input if queued_input is not None else PilotResponse.NEUTRAL


# A pilot model as the engine sees it: grade a decision given the error value.
PilotFn = Callable[[AlertDecision, float], PilotResponse]


def preferences_from_params(params: dict) -> PreferenceTable:
    raw = params.get("preferences")
    if raw is None:
        return dict(DEFAULT_PREFERENCES)
    prefs: PreferenceTable = {}
    for sensor in SensorKind:
        low, high = raw[sensor.name]
        prefs[(sensor, AlertLevel.LOW)] = AlertAction(low)
        prefs[(sensor, AlertLevel.HIGH)] = AlertAction(high)
    return prefs


def make_pilot(spec: PilotModelSpec) -> PilotFn:
    """Build the engine-facing pilot from its config spec.

    Responding pilots Agree with Mandatory alerts (the error is provably in
    the Safety band); the silent pilot stays silent even then.
    """
    if spec.kind == "table":
        prefs = preferences_from_params(spec.params)

        def pilot(decision: AlertDecision, error_value: float) -> PilotResponse:
            if decision.level is DecisionLevel.MANDATORY:
                return PilotResponse.AGREE
            return table_pilot(prefs, decision)

        return pilot
    if spec.kind == "threshold":
        theta = float(spec.params.get("theta", 9.0))

        def pilot(decision: AlertDecision, error_value: float) -> PilotResponse:
            if decision.level is DecisionLevel.MANDATORY:
                return PilotResponse.AGREE
            return threshold_pilot(theta, decision, error_value)

        return pilot
    if spec.kind == "silent":
        return lambda decision, error_value: silent_pilot(decision)
    raise ValueError(f"no scripted pilot for kind {spec.kind!r}")
