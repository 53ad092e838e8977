"""The per-tick autonomy engine: alert lifecycle, response window, reward
application, and sensor-authority switching.

Each tick runs in a fixed order: advance and sense, recompute the
recommendation, open an alert (or grade a silent decision) for the active
sensor, apply any pilot response, time out overdue alerts with an autonomous
switch, then snapshot. All effects surface as trace events.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

from . import agent
from .agent import AlertDecision, policy_summary, summary_colors_json
from .config import ScenarioConfig
from .flightsim import read_sensors, route_complete, step_aircraft
from .model import (
    AircraftState,
    AlertAction,
    AssessmentSet,
    DecisionLevel,
    ErrorRange,
    PilotResponse,
    QTable,
    SensorKind,
    SensorReading,
    TraceEvent,
    range_name,
)
from .pilots import PilotFn, make_pilot
from .reliability import assess, pairwise_discrepancies
from .rng import Rng


class ResponseWithoutAlertError(RuntimeError):
    """A pilot response arrived while no alert was open."""


@dataclass(frozen=True)
class AlertState:
    sensor: SensorKind
    level: DecisionLevel  # LOW, HIGH, or MANDATORY
    opened_tick: int
    deadline_tick: int
    response: PilotResponse
    resolved: bool


@dataclass(frozen=True)
class SensorAuthority:
    active: SensorKind
    recommended: Optional[SensorKind]


@dataclass(frozen=True)
class EngineState:
    tick: int
    aircraft: AircraftState
    readings: Optional[dict[SensorKind, SensorReading]]
    assessments: Optional[AssessmentSet]
    authority: SensorAuthority
    alert: Optional[AlertState]
    q: QTable
    trial_index: int
    temperature: float


def initial_state(config: ScenarioConfig, active: SensorKind = SensorKind.GPS) -> EngineState:
    aircraft = AircraftState(
        position=config.waypoints[0],
        altitude=config.altitude_ft,
        airspeed=config.airspeed_kn,
        heading=0.0,
        waypoint_index=0,
    )
    return EngineState(
        tick=0,
        aircraft=aircraft,
        readings=None,
        assessments=None,
        authority=SensorAuthority(active, None),
        alert=None,
        q=QTable(),
        trial_index=0,
        temperature=config.selection_policy.temperature_at(0),
    )


def select_recommended(
    assessments: AssessmentSet, active: SensorKind
) -> Optional[SensorKind]:
    """Smallest-error reliable alternative; ties break GPS < LIDAR < IMU."""
    candidates = [a for a in assessments.all() if a.sensor != active and a.reliable]
    if not candidates:
        return None
    return min(candidates, key=lambda a: (a.error_value, a.sensor)).sensor


def _snapshot_payload(
    aircraft: AircraftState,
    readings: dict[SensorKind, SensorReading],
    assessments: AssessmentSet,
    authority: SensorAuthority,
    alert: Optional[AlertState],
) -> dict:
    return {
        "aircraft": {
            "position": [aircraft.position.x, aircraft.position.y],
            "altitude": aircraft.altitude,
            "airspeed": aircraft.airspeed,
            "heading": aircraft.heading,
            "waypoint_index": aircraft.waypoint_index,
        },
        "readings": {
            s.name: [readings[s].position.x, readings[s].position.y] for s in SensorKind
        },
        "assessments": {s.name: assessments.get(s).to_json_dict() for s in SensorKind},
        "ambiguous": assessments.ambiguous,
        "authority": {
            "active": authority.active.name,
            "recommended": authority.recommended.name if authority.recommended else None,
        },
        "alert": None
        if alert is None
        else {
            "sensor": alert.sensor.name,
            "level": alert.level.value,
            "opened_tick": alert.opened_tick,
            "deadline_tick": alert.deadline_tick,
            "response": alert.response.value,
            "resolved": alert.resolved,
        },
    }


def _reward_events(
    tick: int, decision_sensor: SensorKind, level: DecisionLevel, action: AlertAction,
    reward: int, q: QTable,
) -> list[TraceEvent]:
    alert_level = level.alert_level
    return [
        TraceEvent(
            tick,
            "RewardApplied",
            {
                "sensor": decision_sensor.name,
                "level": level.value,
                "action": action.value,
                "reward": reward,
                "q_after": q.value(decision_sensor, alert_level, action),
            },
        ),
        TraceEvent(
            tick,
            "PolicyUpdated",
            {"q": q.to_json_dict(), "colors": summary_colors_json(policy_summary(q))},
        ),
    ]


def engine_step(
    state: EngineState,
    pilot_input: Optional[PilotResponse],
    config: ScenarioConfig,
    rng: Rng,
    scripted_pilot: Optional[PilotFn] = None,
) -> tuple[EngineState, list[TraceEvent]]:
    """Advance one tick and return the new state plus the events it emitted.

    pilot_input is the single queued response consumed this tick (None or
    NEUTRAL means no response). scripted_pilot, when given, also grades silent
    Level1/Level2 decisions so training-style runs reward them.
    """
    events: list[TraceEvent] = []
    tick = state.tick
    q = state.q
    trial_index = state.trial_index

    if pilot_input is PilotResponse.NEUTRAL:
        pilot_input = None
    open_at_start = state.alert if state.alert and not state.alert.resolved else None
    if pilot_input is not None and open_at_start is None:
        raise ResponseWithoutAlertError(f"response {pilot_input.value} at tick {tick} with no open alert")

    # 1. advance, sense, assess
    aircraft = step_aircraft(
        state.aircraft, 1.0 / config.tick_hz, config.waypoints, config.ground_speed
    )
    readings = read_sensors(aircraft, config.error_schedule, tick, rng)
    assessments = assess(pairwise_discrepancies(readings), config.thresholds)

    # 2. recompute recommendation
    active = state.authority.active
    recommended = select_recommended(assessments, active)

    alert = open_at_start
    active_assessment = assessments.get(active)
    temperature = config.selection_policy.temperature_at(trial_index)

    # 3. open an alert for the active sensor, or grade a silent decision
    if alert is None and active_assessment.implicated and active_assessment.range >= ErrorRange.LEVEL1:
        decision = agent.decide(
            active_assessment, q, config.selection_policy, trial_index, rng
        )
        temperature = decision.temperature
        if decision.level.learnable:
            trial_index += 1
        if decision.action is AlertAction.WARN:
            alert = AlertState(
                sensor=active,
                level=decision.level,
                opened_tick=tick,
                deadline_tick=tick + config.window_ticks,
                response=PilotResponse.NEUTRAL,
                resolved=False,
            )
            events.append(
                TraceEvent(
                    tick,
                    "AlertOpened",
                    {
                        "sensor": active.name,
                        "level": decision.level.value,
                        "deadline_tick": alert.deadline_tick,
                    },
                )
            )
        elif scripted_pilot is not None and decision.level.learnable:
            response = scripted_pilot(decision, active_assessment.error_value)
            reward = agent.reward_from_alignment(decision, response)
            if reward is not None:
                key = (decision.sensor, decision.level.alert_level, decision.action)
                q = agent.update_q(q, key, reward, config.learning_rate)
                events.extend(
                    _reward_events(tick, decision.sensor, decision.level, decision.action, reward, q)
                )

    authority = SensorAuthority(active, recommended)

    # 4. apply a pilot response to an alert that was open at tick start
    if open_at_start is not None and pilot_input in (PilotResponse.AGREE, PilotResponse.DISAGREE):
        alert = replace(open_at_start, response=pilot_input, resolved=True)
        events.append(TraceEvent(tick, "PilotResponded", {"response": pilot_input.value}))
        if alert.level.learnable:
            decision = AlertDecision(
                alert.sensor, alert.level, AlertAction.WARN, temperature, 1.0
            )
            reward = agent.reward_from_alignment(decision, pilot_input)
            if reward is not None:
                key = (alert.sensor, alert.level.alert_level, AlertAction.WARN)
                q = agent.update_q(q, key, reward, config.learning_rate)
                events.extend(
                    _reward_events(tick, alert.sensor, alert.level, AlertAction.WARN, reward, q)
                )
        events.append(
            TraceEvent(
                tick,
                "AlertResolved",
                {"sensor": alert.sensor.name, "level": alert.level.value, "response": pilot_input.value},
            )
        )
        if pilot_input is PilotResponse.AGREE and recommended is not None:
            authority = SensorAuthority(recommended, select_recommended(assessments, recommended))
            events.append(
                TraceEvent(
                    tick,
                    "SensorSwitched",
                    {"from": active.name, "to": recommended.name, "cause": "agree"},
                )
            )

    # 5. time out an overdue alert; switch autonomously if allowed
    elif open_at_start is not None and tick >= open_at_start.deadline_tick:
        alert = replace(open_at_start, resolved=True)
        events.append(
            TraceEvent(
                tick,
                "AlertResolved",
                {"sensor": alert.sensor.name, "level": alert.level.value, "response": "Neutral"},
            )
        )
        switch_allowed = config.autonomous_switching and recommended is not None
        if switch_allowed and config.switch_requires_error_below_t3:
            switch_allowed = active_assessment.error_value < config.thresholds.t3
        if switch_allowed:
            authority = SensorAuthority(recommended, select_recommended(assessments, recommended))
            events.append(
                TraceEvent(
                    tick,
                    "SensorSwitched",
                    {"from": active.name, "to": recommended.name, "cause": "timeout"},
                )
            )

    # 6. snapshot end-of-tick state
    events.append(
        TraceEvent(
            tick,
            "StateSnapshot",
            _snapshot_payload(aircraft, readings, assessments, authority, alert),
        )
    )

    new_state = EngineState(
        tick=tick + 1,
        aircraft=aircraft,
        readings=readings,
        assessments=assessments,
        authority=authority,
        alert=None if alert is None or alert.resolved else alert,
        q=q,
        trial_index=trial_index,
        temperature=temperature,
    )
    return new_state, events


# Pilot callables used by run loops: (alert, error value) -> response.
AlertResponder = Callable[[AlertState, float], PilotResponse]


def scripted_responder(pilot: PilotFn) -> AlertResponder:
    """Adapt a scripted pilot to respond to an open alert (which implies Warn)."""

    def respond(alert: AlertState, error_value: float) -> PilotResponse:
        decision = AlertDecision(alert.sensor, alert.level, AlertAction.WARN, 0.0, 1.0)
        return pilot(decision, error_value)

    return respond


def run_engine(
    config: ScenarioConfig,
    rng: Optional[Rng] = None,
    responder: Optional[AlertResponder] = None,
    grade_silent: bool = False,
    max_ticks: Optional[int] = None,
    initial: Optional[EngineState] = None,
) -> tuple[EngineState, list[TraceEvent]]:
    """Run the engine until route completion or the tick budget runs out.

    The responder, when given, is consulted once per tick while an alert is
    open and unanswered, starting the tick after it opened.
    """
    rng = rng or Rng(config.seed)
    state = initial or initial_state(config)
    scripted = make_pilot(config.pilot_model) if (grade_silent and config.pilot_model.scripted) else None
    if responder is None and config.pilot_model.kind in ("table", "threshold", "silent"):
        responder = scripted_responder(make_pilot(config.pilot_model))
    limit = config.max_ticks if max_ticks is None else max_ticks
    events: list[TraceEvent] = []
    while state.tick < limit:
        pilot_input: Optional[PilotResponse] = None
        if (
            responder is not None
            and state.alert is not None
            and not state.alert.resolved
            and state.tick > state.alert.opened_tick
        ):
            error = 0.0
            if state.assessments is not None:
                error = state.assessments.get(state.alert.sensor).error_value
            response = responder(state.alert, error)
            pilot_input = None if response is PilotResponse.NEUTRAL else response
        state, tick_events = engine_step(state, pilot_input, config, rng, scripted)
        events.extend(tick_events)
        if route_complete(state.aircraft, config.waypoints):
            break
    return state, events
