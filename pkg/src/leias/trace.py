"""JSON Lines trace files: header line plus one event per line.

Serialization is canonical (sorted keys, compact separators) so that two runs
with the same seed and config produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Iterable

from .model import TraceEvent

ARTIFACT_VERSION = "0.1.0"


class MalformedTraceError(ValueError):
    """A trace file could not be parsed or has an invalid structure."""


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def make_header(mode: str, config_dict: dict, seed: int, **extra) -> dict:
    return {"version": ARTIFACT_VERSION, "mode": mode, "config": config_dict, "seed": seed, **extra}


def event_line(event: TraceEvent) -> str:
    return dumps_canonical({"tick": event.tick, "kind": event.kind, "payload": event.payload})


def trace_lines(header: dict, events: Iterable[TraceEvent]) -> list[str]:
    return [dumps_canonical(header)] + [event_line(e) for e in events]


def write_trace(path: str | Path, header: dict, events: Iterable[TraceEvent]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in trace_lines(header, events):
            fh.write(line + "\n")


def parse_event(line: str, lineno: int) -> TraceEvent:
    try:
        obj = json.loads(line)
        tick = obj["tick"]
        kind = obj["kind"]
        payload = obj["payload"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise MalformedTraceError(f"line {lineno}: {exc}") from exc
    if not isinstance(tick, int) or kind not in TraceEvent.KINDS or not isinstance(payload, dict):
        raise MalformedTraceError(f"line {lineno}: invalid trace event {line!r}")
    return TraceEvent(tick, kind, payload)


def read_trace(path: str | Path) -> tuple[dict, list[TraceEvent]]:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MalformedTraceError("empty trace file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise MalformedTraceError(f"header: {exc}") from exc
    if not isinstance(header, dict) or "version" not in header:
        raise MalformedTraceError("first line is not a trace header")
    events = [parse_event(line, i + 2) for i, line in enumerate(lines[1:])]
    prev_tick = None
    for e in events:
        if prev_tick is not None and e.tick < prev_tick:
            raise MalformedTraceError(f"ticks decrease at tick {e.tick}")
        prev_tick = e.tick
    return header, events


class TraceWriter:
    """Incremental writer used by the live server; flushes every event."""

    def __init__(self, fh: IO[str], header: dict):
        self._fh = fh
        self._fh.write(dumps_canonical(header) + "\n")
        self._fh.flush()

    def write(self, event: TraceEvent) -> None:
        self._fh.write(event_line(event) + "\n")
        self._fh.flush()
