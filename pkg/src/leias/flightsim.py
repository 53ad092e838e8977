"""Waypoint-pursuit aircraft kinematics and per-tick sensor readings with
scheduled error injection.

The aircraft is a 2-D constant-speed point chasing the current waypoint.
Sensor errors are injected as offsets of a scheduled magnitude in a uniformly
random direction drawn from the "errors" substream, so the discrepancy math
downstream sees realistic geometry while magnitudes stay exact.
"""

from __future__ import annotations

import math

from .model import (
    AircraftState,
    ErrorSchedule,
    FixedError,
    NoError,
    Position,
    RampError,
    RandomUniformError,
    SensorKind,
    SensorReading,
)
from .rng import Rng


def step_aircraft(
    state: AircraftState,
    dt_seconds: float,
    route: tuple[Position, ...],
    ground_speed: float = 1.0,
) -> AircraftState:
    """Advance one tick toward the current waypoint.

    Within one step-length of the waypoint the aircraft snaps onto it and the
    waypoint index advances (clamped at the last waypoint, after which the
    aircraft is stationary).
    """
    idx = min(state.waypoint_index, len(route) - 1)
    target = route[idx]
    dist = state.position.distance_to(target)
    step = ground_speed * dt_seconds
    if dist <= step + 1e-12:
        new_pos = target
        new_idx = min(idx + 1, len(route) - 1)
    else:
        frac = step / dist
        new_pos = Position(
            state.position.x + frac * (target.x - state.position.x),
            state.position.y + frac * (target.y - state.position.y),
        )
        new_idx = idx
    next_target = route[new_idx]
    dx = next_target.x - new_pos.x
    dy = next_target.y - new_pos.y
    if dx == 0 and dy == 0:
        heading = state.heading
    else:
        heading = math.degrees(math.atan2(dx, dy)) % 360.0
    return AircraftState(new_pos, state.altitude, state.airspeed, heading, new_idx)


def route_complete(state: AircraftState, route: tuple[Position, ...]) -> bool:
    return state.waypoint_index >= len(route) - 1 and state.position == route[-1]


def scheduled_magnitude(schedule: ErrorSchedule, tick: int, rng: Rng) -> float:
    """Error magnitude for this tick; RandomUniform draws fresh from "errors"."""
    if isinstance(schedule, NoError):
        return 0.0
    if isinstance(schedule, RandomUniformError):
        return rng.stream("errors").uniform(0.0, schedule.max_magnitude)
    if isinstance(schedule, RampError):
        if tick < schedule.start_tick:
            return 0.0
        return min(schedule.cap, (tick - schedule.start_tick) * schedule.rate_per_tick)
    if isinstance(schedule, FixedError):
        if schedule.start_tick <= tick <= schedule.end_tick:
            return schedule.magnitude
        return 0.0
    raise TypeError(f"unknown schedule: {schedule!r}")


def read_sensors(
    truth: AircraftState,
    schedules: dict[SensorKind, ErrorSchedule],
    tick: int,
    rng: Rng,
) -> dict[SensorKind, SensorReading]:
    """One reading per sensor: true position plus the scheduled offset.

    Sensors are processed in GPS < LIDAR < IMU order so the draw sequence is
    reproducible for a given (seed, schedule).
    """
    readings: dict[SensorKind, SensorReading] = {}
    for sensor in SensorKind:
        schedule = schedules[sensor]
        magnitude = scheduled_magnitude(schedule, tick, rng)
        if isinstance(schedule, NoError) or magnitude == 0.0:
            pos = truth.position
        else:
            angle = rng.stream("errors").uniform(0.0, 2.0 * math.pi)
            pos = truth.position.offset(magnitude * math.cos(angle), magnitude * math.sin(angle))
        readings[sensor] = SensorReading(sensor, pos, tick)
    return readings
