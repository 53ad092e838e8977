"""Command-line entry point.

Subcommands: train (scripted learning trials), test (frozen-policy ramp
trials), run (interactive or scripted engine run), verify (trace checking),
replay (byte-exact determinism audit).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .config import ConfigError, load_config, policy_from_flag, with_overrides
from .harness import DivergenceError
from .model import QTable, SensorKind
from .server import InteractiveServer, PortBindError
from .trace import MalformedTraceError, dumps_canonical


def _add_scenario(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", required=True, help="scenario JSON file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leias")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="run scripted learning trials")
    _add_scenario(train)
    train.add_argument("--trials", type=int, required=True)
    train.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    train.add_argument("--policy", default=None, help="'fixed:<tau>' or 'anneal'")
    train.add_argument("--out", required=True, help="output directory")

    test = sub.add_parser("test", help="run frozen-policy ramp trials")
    _add_scenario(test)
    test.add_argument("--qtable", required=True, help="qtable JSON file")
    test.add_argument("--out", required=True)

    run = sub.add_parser("run", help="run the engine (interactive if pilot is 'console')")
    _add_scenario(run)
    run.add_argument("--port", type=int, default=0, help="TCP port for the console endpoint")
    run.add_argument("--out", default=".", help="directory for the trace file")

    verify = sub.add_parser("verify", help="check a trace against the requirements")
    verify.add_argument("--trace", required=True)
    verify.add_argument("--report", default=None, help="write violations as JSON lines here")

    replay = sub.add_parser("replay", help="re-run a recorded trace and compare bytes")
    replay.add_argument("--trace", required=True)

    return parser


def _cmd_train(args) -> int:
    config = load_config(args.scenario)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.policy is not None:
        overrides["selection_policy"] = policy_from_flag(args.policy)
    if overrides:
        config = with_overrides(config, **overrides)
    result = harness.write_training_outputs(config, args.trials, args.out)
    policy = harness.greedy_policy(result.q)
    print(f"trained {args.trials} trials; greedy policy:")
    for (sensor, level), action in policy.items():
        print(f"  {sensor.name:>5} {level.value:<4} -> {action.value}")
    return 0


def _cmd_test(args) -> int:
    config = load_config(args.scenario)
    q = QTable.from_json_dict(json.loads(Path(args.qtable).read_text(encoding="utf-8")))
    records = harness.run_testing(config, q)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "test_records.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(
                dumps_canonical(
                    {
                        "sensor": r.sensor.name,
                        "tick": r.tick,
                        "error_value": r.error_value,
                        "level": r.level.value,
                        "action": r.action.value,
                        "alerted": r.alerted,
                    }
                )
                + "\n"
            )
    for sensor in SensorKind:
        first = harness.first_alert(records, sensor)
        where = f"tick {first.tick} (error {first.error_value})" if first else "never"
        print(f"{sensor.name:>5}: first alert at {where}")
    return 0


def _cmd_run(args) -> int:
    config = load_config(args.scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if config.pilot_model.kind == "console":
        server = InteractiveServer(config, args.port, out / "trace.jsonl")
        print(f"listening on port {server.port}", flush=True)
        return server.run()
    harness.write_run_outputs(config, out)
    print(f"scripted run complete; trace at {out / 'trace.jsonl'}")
    return 0


def _cmd_verify(args) -> int:
    try:
        status, violations = harness.verify_trace_file(args.trace)
    except MalformedTraceError as exc:
        print(f"malformed trace: {exc}", file=sys.stderr)
        return 2
    lines = [dumps_canonical(v.to_json_dict()) for v in violations]
    if args.report:
        Path(args.report).write_text("".join(l + "\n" for l in lines), encoding="utf-8")
    for line in lines:
        print(line)
    print(f"{len(violations)} violation(s)")
    return status


def _cmd_replay(args) -> int:
    try:
        harness.replay_trace_file(args.trace)
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return 1
    except MalformedTraceError as exc:
        print(f"malformed trace: {exc}", file=sys.stderr)
        return 2
    print("replay matched byte-for-byte")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "train": _cmd_train,
        "test": _cmd_test,
        "run": _cmd_run,
        "verify": _cmd_verify,
        "replay": _cmd_replay,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, PortBindError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
