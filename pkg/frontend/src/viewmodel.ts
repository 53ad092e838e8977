/**
 * Pure projection of the server event stream into the console view model.
 *
 * Nothing here is stateful beyond the accumulated ConsoleState: two clients
 * that receive the same lines derive identical views, and every number on
 * screen (countdown included) is re-derived from event ticks rather than a
 * free-running client timer.
 */

import {
  BarColor,
  LEVELS,
  Level,
  RunHeader,
  SENSORS,
  Sensor,
  ServerLine,
  SnapshotPayload,
} from "./protocol.js";

export interface OpenAlert {
  sensor: Sensor;
  level: "Low" | "High" | "Mandatory";
  openedTick: number;
  deadlineTick: number;
}

/** Everything the view needs, accumulated from server lines. */
export interface ConsoleState {
  header: RunHeader | null;
  latestTick: number;
  snapshot: SnapshotPayload | null;
  colors: Record<string, BarColor> | null;
  q: Record<string, number> | null;
  alert: OpenAlert | null;
}

export function initialState(): ConsoleState {
  return { header: null, latestTick: 0, snapshot: null, colors: null, q: null, alert: null };
}

/** Fold one server line into the state; returns a new state object. */
export function applyLine(state: ConsoleState, line: ServerLine): ConsoleState {
  if (line.type === "header") {
    return { ...state, header: line.header };
  }
  if (line.type === "error") {
    return state;
  }
  const event = line.event;
  const next: ConsoleState = { ...state, latestTick: Math.max(state.latestTick, event.tick) };
  switch (event.kind) {
    case "AlertOpened":
      next.alert = {
        sensor: event.payload.sensor,
        level: event.payload.level,
        openedTick: event.tick,
        deadlineTick: event.payload.deadline_tick,
      };
      break;
    case "AlertResolved":
      next.alert = null;
      break;
    case "PolicyUpdated":
      next.colors = event.payload.colors as Record<string, BarColor>;
      next.q = event.payload.q;
      break;
    case "StateSnapshot":
      next.snapshot = event.payload;
      break;
    default:
      break;
  }
  return next;
}

export interface BarCell {
  sensor: Sensor;
  level: Level;
  color: BarColor;
}

export interface ScoreEntry {
  sensor: Sensor;
  label: string;
  value: number;
}

export interface AlertBanner {
  sensor: Sensor;
  severity: "Low" | "High" | "Mandatory";
  countdownSeconds: number;
  discrepancy: string;
}

export interface MapMarker {
  sensor: Sensor;
  x: number;
  y: number;
}

export interface ConsoleViewModel {
  markers: MapMarker[];
  waypoint: { x: number; y: number } | null;
  altitude: number | null;
  airspeed: number | null;
  bars: { cells: BarCell[]; caps: { normal: "Green"; safety: "Red" } };
  scores: ScoreEntry[];
  alert: AlertBanner | null;
  activeSensorBadge: Sensor | null;
  warningIcon: boolean;
}

/** Six per-sensor/level cells colored by the learned policy; White until decided. */
export function renderSeverityBars(colors: Record<string, BarColor> | null): BarCell[] {
  const cells: BarCell[] = [];
  for (const sensor of SENSORS) {
    for (const level of LEVELS) {
      cells.push({ sensor, level, color: colors?.[`${sensor}.${level}`] ?? "White" });
    }
  }
  return cells;
}

/** Qualitative error magnitude, banded by the run's own thresholds. */
export function renderDiscrepancyLabel(errorValue: number, t1: number, t3: number): string {
  if (errorValue < t1) return "within a building";
  if (errorValue < t3) return "within a block";
  return "across town";
}

const SCORE_LABELS: ReadonlyArray<readonly [Level, "Warn" | "DoNotWarn", string]> = [
  ["Low", "Warn", "Warn Low"],
  ["Low", "DoNotWarn", "Do Not Warn Low"],
  ["High", "Warn", "Warn High"],
  ["High", "DoNotWarn", "Do Not Warn High"],
];

function renderScores(q: Record<string, number> | null): ScoreEntry[] {
  const entries: ScoreEntry[] = [];
  for (const sensor of SENSORS) {
    for (const [level, action, label] of SCORE_LABELS) {
      entries.push({ sensor, label, value: q?.[`${sensor}.${level}.${action}`] ?? 0 });
    }
  }
  return entries;
}

/** Seconds left in the response window, re-derived from ticks; never negative. */
export function countdownSeconds(alert: OpenAlert, latestTick: number, tickHz: number): number {
  return Math.max(0, (alert.deadlineTick - latestTick) / tickHz);
}

export function deriveView(state: ConsoleState): ConsoleViewModel {
  const { header, snapshot, alert } = state;
  const markers: MapMarker[] = snapshot
    ? SENSORS.map((sensor) => {
        const [x, y] = snapshot.readings[sensor];
        return { sensor, x, y };
      })
    : [];

  let waypoint: { x: number; y: number } | null = null;
  if (header && snapshot) {
    const route = header.config.waypoints;
    const target = route[Math.min(snapshot.aircraft.waypoint_index, route.length - 1)];
    if (target) waypoint = { x: target[0], y: target[1] };
  }

  let banner: AlertBanner | null = null;
  if (alert && header) {
    const { t1, t3 } = header.config.thresholds;
    const errorValue = snapshot?.assessments[alert.sensor].error_value ?? 0;
    banner = {
      sensor: alert.sensor,
      severity: alert.level,
      countdownSeconds: countdownSeconds(alert, state.latestTick, header.config.tick_hz),
      discrepancy: renderDiscrepancyLabel(errorValue, t1, t3),
    };
  }

  return {
    markers,
    waypoint,
    altitude: snapshot?.aircraft.altitude ?? null,
    airspeed: snapshot?.aircraft.airspeed ?? null,
    bars: { cells: renderSeverityBars(state.colors), caps: { normal: "Green", safety: "Red" } },
    scores: renderScores(state.q),
    alert: banner,
    activeSensorBadge: snapshot?.authority.active ?? null,
    warningIcon: alert !== null,
  };
}
