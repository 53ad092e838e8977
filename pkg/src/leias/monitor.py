"""Trace-level checking of the alerting and sensor-authority requirements.

The monitor consumes only trace events, never engine internals, so it can
check traces produced elsewhere. Each requirement is a per-tick (or short
look-back) predicate; a violation carries enough bindings to re-evaluate the
predicate on its own.

Requirements:
  G1: a Normal-range assessment is reliable.
  G2: an implicated sensor in the Safety range is unreliable.
  G3: an opened alert gets an Agree/Disagree response by its deadline.
  G4: an active sensor implicated at Safety has an alert opened or open.
  G5: no alert opens for an active sensor in the Normal range.
  L2: an unreliable active sensor is justified by a same-tick Disagree, by
      having been reliable or unimplicated the tick before, or by there having
      been no reliable sensor the tick before. Look-backs hold vacuously at
      the first tick of a trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .model import TraceEvent

REQUIREMENT_IDS = (
    "G1-normal-reliable",
    "G2-safety-unreliable",
    "G3-response-expected",
    "G4-mandatory-alert",
    "G5-normal-no-alert",
    "L2-unreliable-active-justified",
)

SENSORS = ("GPS", "LIDAR", "IMU")


class MalformedTraceError(ValueError):
    """The event sequence cannot be interpreted as a run trace."""


@dataclass(frozen=True)
class Violation:
    requirement: str
    tick: int
    bindings: dict

    def to_json_dict(self) -> dict:
        return {"req": self.requirement, "tick": self.tick, "bindings": self.bindings}


@dataclass
class _TickRecord:
    tick: int
    snapshot: Optional[dict] = None
    alerts_opened: list = field(default_factory=list)
    responses: list = field(default_factory=list)


def _collect(trace: list[TraceEvent]) -> list[_TickRecord]:
    by_tick: dict[int, _TickRecord] = {}
    prev = None
    for event in trace:
        if prev is not None and event.tick < prev:
            raise MalformedTraceError(f"ticks decrease at {event.tick}")
        prev = event.tick
        rec = by_tick.setdefault(event.tick, _TickRecord(event.tick))
        if event.kind == "StateSnapshot":
            if rec.snapshot is not None:
                raise MalformedTraceError(f"duplicate StateSnapshot at tick {event.tick}")
            rec.snapshot = event.payload
        elif event.kind == "AlertOpened":
            rec.alerts_opened.append(event.payload)
        elif event.kind == "PilotResponded":
            rec.responses.append(event.payload.get("response"))
    return [by_tick[t] for t in sorted(by_tick)]


def check_trace(trace: list[TraceEvent]) -> list[Violation]:
    records = _collect(trace)
    violations: list[Violation] = []
    last_tick = records[-1].tick if records else None

    prev_snapshot: Optional[dict] = None
    first_snapshot_tick: Optional[int] = None
    for rec in records:
        snap = rec.snapshot
        if snap is None:
            continue
        if first_snapshot_tick is None:
            first_snapshot_tick = rec.tick
        assessments = snap["assessments"]
        active = snap["authority"]["active"]
        active_a = assessments[active]

        for sensor in SENSORS:
            a = assessments[sensor]
            if a["range"] == "Normal" and not a["reliable"]:
                violations.append(
                    Violation("G1-normal-reliable", rec.tick, {"sensor": sensor, **a})
                )
            if a["implicated"] and a["range"] == "Safety" and a["reliable"]:
                violations.append(
                    Violation("G2-safety-unreliable", rec.tick, {"sensor": sensor, **a})
                )

        opened_for_active = any(o.get("sensor") == active for o in rec.alerts_opened)
        alert = snap.get("alert")
        open_for_active = alert is not None and alert.get("sensor") == active
        if active_a["implicated"] and active_a["range"] == "Safety":
            if not (opened_for_active or open_for_active):
                violations.append(
                    Violation(
                        "G4-mandatory-alert",
                        rec.tick,
                        {"active": active, "range": "Safety", "alert_open": False},
                    )
                )
        if active_a["range"] == "Normal" and opened_for_active:
            violations.append(
                Violation(
                    "G5-normal-no-alert",
                    rec.tick,
                    {"active": active, "range": "Normal"},
                )
            )

        if not active_a["reliable"] and rec.tick != first_snapshot_tick and prev_snapshot is not None:
            disagreed = "Disagree" in rec.responses
            prev_a = prev_snapshot["assessments"][active]
            was_ok = prev_a["reliable"] or not prev_a["implicated"]
            prev_reliable = [
                s for s in SENSORS if prev_snapshot["assessments"][s]["reliable"]
            ]
            if not (disagreed or was_ok or not prev_reliable):
                violations.append(
                    Violation(
                        "L2-unreliable-active-justified",
                        rec.tick,
                        {
                            "active": active,
                            "response": rec.responses[-1] if rec.responses else "Neutral",
                            "prev_reliable": prev_a["reliable"],
                            "prev_implicated": prev_a["implicated"],
                            "prev_reliable_sensors": prev_reliable,
                        },
                    )
                )
        prev_snapshot = snap

    # G3: every opened alert needs a response inside its window, judged only
    # when the trace actually covers the deadline tick.
    for rec in records:
        for opened in rec.alerts_opened:
            deadline = opened.get("deadline_tick", rec.tick)
            if last_tick is None or last_tick < deadline:
                continue
            answered = any(
                r.tick >= rec.tick and r.tick <= deadline and any(x in ("Agree", "Disagree") for x in r.responses)
                for r in records
            )
            if not answered:
                violations.append(
                    Violation(
                        "G3-response-expected",
                        deadline,
                        {
                            "sensor": opened.get("sensor"),
                            "opened_tick": rec.tick,
                            "deadline_tick": deadline,
                        },
                    )
                )

    violations.sort(key=lambda v: (v.tick, v.requirement))
    return violations


def extract_counterexample(trace: list[TraceEvent], violation: Violation) -> list[TraceEvent]:
    """The event window ending at the violating tick that covers every tick
    the predicate looked at (one tick of look-back for L2, the alert interval
    for G3, the violating tick alone otherwise)."""
    if violation.requirement == "L2-unreliable-active-justified":
        ticks = sorted({e.tick for e in trace if e.tick <= violation.tick})
        start = ticks[-2] if len(ticks) >= 2 else violation.tick
    elif violation.requirement == "G3-response-expected":
        start = violation.bindings["opened_tick"]
    else:
        start = violation.tick
    return [e for e in trace if start <= e.tick <= violation.tick]
