"""The alerting decision cycle: propose Warn/DoNotWarn, select by Boltzmann
exploration over learned values, apply pilot-alignment rewards, and summarize
the learned policy for display.

Hard rules bracket the learnable region: the Safety band always warns and the
Normal band never does. Only Level1/Level2 decisions go through the learned
values, and only those decisions are ever rewarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .model import (
    AlertAction,
    AlertLevel,
    DecisionLevel,
    ErrorRange,
    PilotResponse,
    QTable,
    SensorAssessment,
    SensorKind,
    decision_level_for,
)
from .rng import Rng

# Q-gap below which a policy cell displays as undecided (white).
UNDECIDED_EPSILON = 0.05

DEFAULT_LEARNING_RATE = 0.1
DEFAULT_HIGH_TEMPERATURE = 1.0
DEFAULT_LOW_TEMPERATURE = 0.1
DEFAULT_ANNEAL_T0 = 2.0
DEFAULT_ANNEAL_DECAY = 0.98
DEFAULT_ANNEAL_FLOOR = 0.05


class NotImplicatedError(ValueError):
    """decide() only applies to the implicated sensor's assessment."""


@dataclass(frozen=True)
class BoltzmannFixed:
    temperature: float

    def validate(self) -> "BoltzmannFixed":
        if not (math.isfinite(self.temperature) and self.temperature > 0):
            raise ValueError(f"temperature must be finite and > 0: {self.temperature}")
        return self

    def temperature_at(self, trial_index: int) -> float:
        return self.temperature


@dataclass(frozen=True)
class Annealing:
    """Exponential cooling: tau(trial) = max(floor, t0 * decay**trial)."""

    t0: float
    decay: float
    floor: float

    def validate(self) -> "Annealing":
        ok = (
            math.isfinite(self.t0)
            and math.isfinite(self.decay)
            and math.isfinite(self.floor)
            and self.t0 > 0
            and 0 < self.decay < 1
            and 0 < self.floor <= self.t0
        )
        if not ok:
            raise ValueError(f"bad annealing parameters: {self}")
        return self

    def temperature_at(self, trial_index: int) -> float:
        return max(self.floor, self.t0 * self.decay**trial_index)


SelectionPolicy = BoltzmannFixed | Annealing


@dataclass(frozen=True)
class AlertDecision:
    sensor: SensorKind
    level: DecisionLevel
    action: AlertAction
    temperature: float
    probability: float  # probability with which the chosen action was selected


@dataclass(frozen=True)
class PolicyCell:
    color: str  # "Red" | "Green" | "White"
    q_warn: float
    q_do_not_warn: float


PolicySummary = dict[tuple[SensorKind, AlertLevel], PolicyCell]


def boltzmann_probabilities(q_warn: float, q_no_warn: float, tau: float) -> tuple[float, float]:
    """Two-action softmax at temperature tau, computed max-shifted for stability."""
    if tau <= 0:
        raise ValueError(f"temperature must be > 0: {tau}")
    m = max(q_warn, q_no_warn)
    ew = math.exp((q_warn - m) / tau)
    en = math.exp((q_no_warn - m) / tau)
    z = ew + en
    return ew / z, en / z


def select_boltzmann(
    q_warn: float, q_no_warn: float, tau: float, rng: Rng
) -> tuple[AlertAction, float]:
    p_warn, p_no_warn = boltzmann_probabilities(q_warn, q_no_warn, tau)
    if rng.stream("selection").random() < p_warn:
        return AlertAction.WARN, p_warn
    return AlertAction.DO_NOT_WARN, p_no_warn


def decide(
    assessment: SensorAssessment,
    q: QTable,
    policy: SelectionPolicy,
    trial_index: int,
    rng: Rng,
) -> AlertDecision:
    """One decision cycle for the implicated sensor's current error range."""
    if not assessment.implicated:
        raise NotImplicatedError(f"{assessment.sensor.name} is not implicated")
    tau = policy.temperature_at(trial_index)
    level = decision_level_for(assessment.range)
    if level is DecisionLevel.MANDATORY:
        return AlertDecision(assessment.sensor, level, AlertAction.WARN, tau, 1.0)
    if level is DecisionLevel.SUPPRESSED:
        return AlertDecision(assessment.sensor, level, AlertAction.DO_NOT_WARN, tau, 1.0)
    alert_level = level.alert_level
    action, prob = select_boltzmann(
        q.value(assessment.sensor, alert_level, AlertAction.WARN),
        q.value(assessment.sensor, alert_level, AlertAction.DO_NOT_WARN),
        tau,
        rng,
    )
    return AlertDecision(assessment.sensor, level, action, tau, prob)


def greedy_action(q: QTable, sensor: SensorKind, level: AlertLevel) -> AlertAction:
    """Exploitation-only choice used in testing trials; ties stay silent."""
    if q.value(sensor, level, AlertAction.WARN) > q.value(sensor, level, AlertAction.DO_NOT_WARN):
        return AlertAction.WARN
    return AlertAction.DO_NOT_WARN


def reward_from_alignment(decision: AlertDecision, response: PilotResponse) -> Optional[int]:
    """+1 for Agree, -1 for Disagree, no update for Neutral."""
    if not decision.level.learnable:
        raise ValueError(f"only Low/High decisions are rewarded, got {decision.level}")
    if response is PilotResponse.AGREE:
        return 1
    if response is PilotResponse.DISAGREE:
        return -1
    return None


def update_q(
    q: QTable,
    key: tuple[SensorKind, AlertLevel, AlertAction],
    reward: int,
    alpha: float = DEFAULT_LEARNING_RATE,
) -> QTable:
    """Single-step value estimate: Q <- Q + alpha * (r - Q)."""
    sensor, level, action = key
    old = q.value(sensor, level, action)
    return q.with_value(sensor, level, action, old + alpha * (reward - old))


def policy_summary(q: QTable) -> PolicySummary:
    summary: PolicySummary = {}
    for sensor in SensorKind:
        for level in AlertLevel:
            qw = q.value(sensor, level, AlertAction.WARN)
            qn = q.value(sensor, level, AlertAction.DO_NOT_WARN)
            if qw - qn > UNDECIDED_EPSILON:
                color = "Red"
            elif qn - qw > UNDECIDED_EPSILON:
                color = "Green"
            else:
                color = "White"
            summary[(sensor, level)] = PolicyCell(color, qw, qn)
    return summary


def summary_colors_json(summary: PolicySummary) -> dict:
    return {
        f"{s.name}.{l.value}": summary[(s, l)].color for s in SensorKind for l in AlertLevel
    }
