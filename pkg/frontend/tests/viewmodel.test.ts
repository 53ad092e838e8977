import { describe, expect, it } from "vitest";

import { parseServerLine, ServerLine } from "../src/protocol.js";
import {
  ConsoleState,
  applyLine,
  countdownSeconds,
  deriveView,
  initialState,
  renderDiscrepancyLabel,
  renderSeverityBars,
} from "../src/viewmodel.js";

const headerLine = JSON.stringify({
  version: "0.1.0",
  mode: "interactive",
  seed: 7,
  config: {
    waypoints: [
      [0, 0],
      [400, 0],
    ],
    tick_hz: 5,
    thresholds: { t1: 3, t2: 9, t3: 15 },
    response_window_s: 2,
  },
});

function snapshotLine(tick: number, extras: Record<string, unknown> = {}): string {
  return JSON.stringify({
    tick,
    kind: "StateSnapshot",
    payload: {
      aircraft: { position: [1.2, 0], altitude: 3000, airspeed: 120, heading: 90, waypoint_index: 1 },
      readings: { GPS: [11.2, 0], LIDAR: [1.2, 0], IMU: [1.2, 0] },
      assessments: {
        GPS: { error_value: 10, range: "Level2", implicated: true, reliable: false },
        LIDAR: { error_value: 0, range: "Normal", implicated: false, reliable: true },
        IMU: { error_value: 0, range: "Normal", implicated: false, reliable: true },
      },
      ambiguous: false,
      authority: { active: "GPS", recommended: "LIDAR" },
      alert: null,
      ...extras,
    },
  });
}

function fold(lines: string[]): ConsoleState {
  return lines.map(parseServerLine).reduce(applyLine, initialState());
}

// Server-side summary colors for a converged preference-table policy.
const TABLE_COLORS = {
  "GPS.Low": "Red",
  "GPS.High": "Green",
  "LIDAR.Low": "Red",
  "LIDAR.High": "Red",
  "IMU.Low": "Green",
  "IMU.High": "Green",
};

function policyLine(tick: number): string {
  const q: Record<string, number> = {};
  for (const sensor of ["GPS", "LIDAR", "IMU"]) {
    for (const level of ["Low", "High"]) {
      for (const action of ["Warn", "DoNotWarn"]) {
        const preferWarn = TABLE_COLORS[`${sensor}.${level}` as keyof typeof TABLE_COLORS] === "Red";
        q[`${sensor}.${level}.${action}`] = (action === "Warn") === preferWarn ? 0.9 : -0.9;
      }
    }
  }
  return JSON.stringify({ tick, kind: "PolicyUpdated", payload: { q, colors: TABLE_COLORS } });
}

describe("view purity", () => {
  it("identical event streams render identical view models", () => {
    const lines = [
      headerLine,
      JSON.stringify({
        tick: 8,
        kind: "AlertOpened",
        payload: { sensor: "GPS", level: "High", deadline_tick: 18 },
      }),
      snapshotLine(8),
      policyLine(9),
      snapshotLine(9),
    ];
    const a = deriveView(fold(lines));
    const b = deriveView(fold(lines));
    expect(a).toEqual(b);
    expect(JSON.stringify(a)).toBe(JSON.stringify(b));
  });
});

describe("severity bars", () => {
  it("are all White before any policy update, with fixed end caps", () => {
    const view = deriveView(fold([headerLine, snapshotLine(1)]));
    expect(view.bars.cells.map((c) => c.color)).toEqual(Array(6).fill("White"));
    expect(view.bars.caps).toEqual({ normal: "Green", safety: "Red" });
  });

  it("recolor to the converged preference-table pattern on PolicyUpdated", () => {
    const view = deriveView(fold([headerLine, snapshotLine(1), policyLine(2)]));
    const byCell = Object.fromEntries(view.bars.cells.map((c) => [`${c.sensor}.${c.level}`, c.color]));
    expect(byCell).toEqual(TABLE_COLORS);
  });

  it("preserve the GPS, LIDAR, IMU x Low, High cell order", () => {
    const cells = renderSeverityBars(null);
    expect(cells.map((c) => `${c.sensor}.${c.level}`)).toEqual([
      "GPS.Low",
      "GPS.High",
      "LIDAR.Low",
      "LIDAR.High",
      "IMU.Low",
      "IMU.High",
    ]);
  });
});

describe("scores", () => {
  it("exposes 12 labelled Q values sourced from PolicyUpdated", () => {
    const view = deriveView(fold([headerLine, policyLine(1)]));
    expect(view.scores).toHaveLength(12);
    const labels = new Set(view.scores.map((s) => s.label));
    expect(labels).toEqual(
      new Set(["Warn Low", "Do Not Warn Low", "Warn High", "Do Not Warn High"])
    );
    const gpsWarnLow = view.scores.find((s) => s.sensor === "GPS" && s.label === "Warn Low");
    expect(gpsWarnLow?.value).toBe(0.9);
  });

  it("defaults to zeros before learning data arrives", () => {
    const view = deriveView(initialState());
    expect(view.scores.every((s) => s.value === 0)).toBe(true);
  });
});

describe("discrepancy labels", () => {
  it("bands by the run thresholds", () => {
    expect(renderDiscrepancyLabel(0.5, 3, 15)).toBe("within a building");
    expect(renderDiscrepancyLabel(10, 3, 15)).toBe("within a block");
    expect(renderDiscrepancyLabel(20, 3, 15)).toBe("across town");
  });

  it("treats band edges as half-open", () => {
    expect(renderDiscrepancyLabel(3, 3, 15)).toBe("within a block");
    expect(renderDiscrepancyLabel(15, 3, 15)).toBe("across town");
  });
});

describe("alert banner and countdown", () => {
  const alertLines = [
    headerLine,
    JSON.stringify({
      tick: 10,
      kind: "AlertOpened",
      payload: { sensor: "GPS", level: "High", deadline_tick: 20 },
    }),
    snapshotLine(10),
  ];

  it("derives the countdown from ticks, not a local timer", () => {
    const state = fold(alertLines);
    const view = deriveView(state);
    // (20 - 10) ticks at 5 Hz.
    expect(view.alert?.countdownSeconds).toBe(2.0);
    expect(view.warningIcon).toBe(true);

    const later = applyLine(state, parseServerLine(snapshotLine(15)));
    expect(deriveView(later).alert?.countdownSeconds).toBe(1.0);
  });

  it("never shows a negative countdown", () => {
    const state = fold([...alertLines, snapshotLine(23)]);
    expect(deriveView(state).alert?.countdownSeconds).toBe(0);
    expect(
      countdownSeconds({ sensor: "GPS", level: "High", openedTick: 10, deadlineTick: 20 }, 99, 5)
    ).toBe(0);
  });

  it("labels the alert with the implicated sensor's discrepancy", () => {
    const view = deriveView(fold(alertLines));
    expect(view.alert).toMatchObject({ sensor: "GPS", severity: "High", discrepancy: "within a block" });
  });

  it("clears on AlertResolved", () => {
    const resolved = JSON.stringify({
      tick: 12,
      kind: "AlertResolved",
      payload: { sensor: "GPS", level: "High", response: "Agree" },
    });
    const view = deriveView(fold([...alertLines, resolved]));
    expect(view.alert).toBeNull();
    expect(view.warningIcon).toBe(false);
  });
});

describe("instruments and map", () => {
  it("projects positions, waypoint, altitude, airspeed, and the active badge", () => {
    const view = deriveView(fold([headerLine, snapshotLine(3)]));
    expect(view.markers).toEqual([
      { sensor: "GPS", x: 11.2, y: 0 },
      { sensor: "LIDAR", x: 1.2, y: 0 },
      { sensor: "IMU", x: 1.2, y: 0 },
    ]);
    expect(view.waypoint).toEqual({ x: 400, y: 0 });
    expect(view.altitude).toBe(3000);
    expect(view.airspeed).toBe(120);
    expect(view.activeSensorBadge).toBe("GPS");
  });

  it("rejects malformed server lines", () => {
    expect(() => parseServerLine("not json")).toThrow();
    expect(() =>
      parseServerLine(JSON.stringify({ tick: 1, kind: "AlertOpened", payload: { sensor: "RADAR" } }))
    ).toThrow();
  });

  it("passes error notices through without disturbing state", () => {
    const state = fold([headerLine, snapshotLine(2)]);
    const line: ServerLine = parseServerLine(JSON.stringify({ type: "error", message: "nope" }));
    expect(applyLine(state, line)).toEqual(state);
  });
});
