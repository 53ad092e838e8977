"""Training and testing trial loops, scripted runs, trace verification, and
deterministic replay. All file formats produced here are byte-reproducible
from (seed, config).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import agent
from .config import ScenarioConfig, config_from_json_dict
from .engine import run_engine
from .model import (
    AlertAction,
    AlertLevel,
    ConfigError,
    DecisionLevel,
    ErrorRange,
    PilotResponse,
    QTable,
    SensorAssessment,
    SensorKind,
    TraceEvent,
    decision_level_for,
)
from .monitor import Violation, check_trace
from .pilots import make_pilot
from .reliability import classify
from .rng import Rng
from .trace import (
    ARTIFACT_VERSION,
    MalformedTraceError,
    dumps_canonical,
    make_header,
    read_trace,
    trace_lines,
    write_trace,
)

CURVE_SAMPLE_EVERY = 10


class DivergenceError(RuntimeError):
    """A replayed run did not reproduce the recorded trace."""

    def __init__(self, message: str, line_number: int):
        super().__init__(message)
        self.line_number = line_number


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    sensor: SensorKind
    level: AlertLevel
    error_value: float
    action: AlertAction
    response: PilotResponse
    reward: Optional[int]
    q_after: float
    temperature: float


@dataclass(frozen=True)
class TestRecord:
    sensor: SensorKind
    tick: int
    error_value: float
    level: DecisionLevel
    action: AlertAction
    alerted: bool


@dataclass
class TrainingResult:
    q: QTable
    records: list[TrialRecord]
    curves: list[dict]
    events: list[TraceEvent]


def run_training(config: ScenarioConfig, trials: int) -> TrainingResult:
    """Scripted learning trials over the Level1/Level2 band.

    Each trial draws a sensor and an error uniformly from [t1, t3), runs one
    decision cycle, grades it with the scripted pilot, and applies the reward.
    Curves are sampled every 10 trials.
    """
    if not config.pilot_model.scripted:
        raise ConfigError("training needs a scripted pilot model (table or threshold)")
    pilot = make_pilot(config.pilot_model)
    rng = Rng(config.seed)
    draw = rng.stream("training")
    q = QTable()
    records: list[TrialRecord] = []
    curves: list[dict] = []
    events: list[TraceEvent] = []
    cumulative_reward = 0

    for i in range(trials):
        sensor = SensorKind(draw.randrange(3))
        error = draw.uniform(config.thresholds.t1, config.thresholds.t3)
        rng_band = classify(error, config.thresholds)
        assessment = SensorAssessment(sensor, error, rng_band, implicated=True, reliable=False)
        decision = agent.decide(assessment, q, config.selection_policy, i, rng)
        response = pilot(decision, error)
        reward = agent.reward_from_alignment(decision, response)
        level = decision.level.alert_level
        if reward is not None:
            q = agent.update_q(q, (sensor, level, decision.action), reward, config.learning_rate)
            cumulative_reward += reward
        q_after = q.value(sensor, level, decision.action)
        records.append(
            TrialRecord(i, sensor, level, error, decision.action, response, reward, q_after, decision.temperature)
        )
        events.append(
            TraceEvent(
                i,
                "RewardApplied",
                {
                    "sensor": sensor.name,
                    "level": level.value,
                    "action": decision.action.value,
                    "reward": reward if reward is not None else 0,
                    "q_after": q_after,
                },
            )
        )
        events.append(
            TraceEvent(
                i,
                "PolicyUpdated",
                {
                    "q": q.to_json_dict(),
                    "colors": agent.summary_colors_json(agent.policy_summary(q)),
                },
            )
        )
        trial_no = i + 1
        if trial_no % CURVE_SAMPLE_EVERY == 0 or trial_no == trials:
            curves.append(
                {"trial": trial_no, "cumulative_reward": cumulative_reward, **q.to_json_dict()}
            )

    return TrainingResult(q, records, curves, events)


def greedy_policy(q: QTable) -> dict[tuple[SensorKind, AlertLevel], AlertAction]:
    return {
        (s, l): agent.greedy_action(q, s, l) for s in SensorKind for l in AlertLevel
    }


def curves_csv_text(curves: list[dict]) -> str:
    fieldnames = ["trial", "cumulative_reward"] + [
        f"{s.name}.{l.value}.{a.value}" for (s, l, a) in QTable.DOMAIN
    ]
    buf = io.StringIO(newline="")
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in curves:
        writer.writerow(row)
    return buf.getvalue()


class TestingProtocolError(AssertionError):
    """A ramp reached the Safety band without a mandatory alert."""


def run_testing(config: ScenarioConfig, q: QTable, overshoot: float = 3.0) -> list[TestRecord]:
    """Ramp each sensor's error from zero past the safety threshold with
    learning frozen; decisions are exploitation-only (greedy).

    Raises TestingProtocolError if any Safety-band tick fails to alert.
    """
    records: list[TestRecord] = []
    for sensor in SensorKind:
        error = 0.0
        tick = 0
        while error < config.thresholds.t3 + overshoot:
            band = classify(error, config.thresholds)
            level = decision_level_for(band)
            if level is DecisionLevel.SUPPRESSED:
                action = AlertAction.DO_NOT_WARN
            elif level is DecisionLevel.MANDATORY:
                action = AlertAction.WARN
            else:
                action = agent.greedy_action(q, sensor, level.alert_level)
            alerted = action is AlertAction.WARN
            if level is DecisionLevel.MANDATORY and not alerted:
                raise TestingProtocolError(f"{sensor.name}: no mandatory alert at error {error}")
            records.append(TestRecord(sensor, tick, error, level, action, alerted))
            error += 1.0
            tick += 1
    return records


def first_alert(records: list[TestRecord], sensor: SensorKind) -> Optional[TestRecord]:
    for r in records:
        if r.sensor is sensor and r.alerted:
            return r
    return None


# --- scripted runs and file output ---


def run_scripted(config: ScenarioConfig, max_ticks: Optional[int] = None):
    """Run the engine to completion with the configured scripted pilot."""
    if config.pilot_model.kind == "console":
        raise ConfigError("scripted runs need a non-console pilot model")
    return run_engine(config, grade_silent=True, max_ticks=max_ticks)


def write_training_outputs(config: ScenarioConfig, trials: int, out_dir: str | Path) -> TrainingResult:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = run_training(config, trials)
    header = make_header("train", config.to_json_dict(), config.seed, trials=trials)
    write_trace(out / "trace.jsonl", header, result.events)
    (out / "curves.csv").write_text(curves_csv_text(result.curves), encoding="utf-8")
    (out / "qtable.json").write_text(
        dumps_canonical(result.q.to_json_dict()) + "\n", encoding="utf-8"
    )
    return result


def write_run_outputs(config: ScenarioConfig, out_dir: str | Path):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    state, events = run_scripted(config)
    header = make_header("run", config.to_json_dict(), config.seed)
    write_trace(out / "trace.jsonl", header, events)
    return state, events


def verify_trace_file(trace_path: str | Path) -> tuple[int, list[Violation]]:
    """Exit code 0 iff no violations; 2 reserved for malformed traces."""
    _, events = read_trace(trace_path)
    violations = check_trace(events)
    return (0 if not violations else 1), violations


def replay_trace_file(trace_path: str | Path) -> None:
    """Re-run the recorded mode with the recorded config and compare bytes."""
    path = Path(trace_path)
    recorded_lines = path.read_text(encoding="utf-8").splitlines()
    header, _ = read_trace(path)
    if header.get("version") != ARTIFACT_VERSION:
        raise DivergenceError(
            f"trace version {header.get('version')!r} != artifact version {ARTIFACT_VERSION!r}",
            1,
        )
    config = config_from_json_dict(header["config"])
    mode = header.get("mode")
    if mode == "train":
        result = run_training(config, int(header["trials"]))
        regenerated = trace_lines(
            make_header("train", config.to_json_dict(), config.seed, trials=int(header["trials"])),
            result.events,
        )
    elif mode == "run":
        _, events = run_scripted(config)
        regenerated = trace_lines(make_header("run", config.to_json_dict(), config.seed), events)
    else:
        raise MalformedTraceError(f"cannot replay trace mode {mode!r}")
    for i, (old, new) in enumerate(zip(recorded_lines, regenerated)):
        if old != new:
            raise DivergenceError(f"first divergence at line {i + 1}", i + 1)
    if len(recorded_lines) != len(regenerated):
        n = min(len(recorded_lines), len(regenerated)) + 1
        raise DivergenceError(f"trace length differs at line {n}", n)
