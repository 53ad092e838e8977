import * as net from "node:net";
import { AddressInfo } from "node:net";
import { afterEach, describe, expect, it } from "vitest";

import { ConsoleClient, canSubmit } from "../src/client.js";
import { parseServerLine } from "../src/protocol.js";
import { applyLine, initialState } from "../src/viewmodel.js";

const headerLine = JSON.stringify({
  version: "0.1.0",
  mode: "interactive",
  seed: 1,
  config: {
    waypoints: [
      [0, 0],
      [100, 0],
    ],
    tick_hz: 5,
    thresholds: { t1: 3, t2: 9, t3: 15 },
    response_window_s: 2,
  },
});

function alertLine(tick: number, deadline: number): string {
  return JSON.stringify({
    tick,
    kind: "AlertOpened",
    payload: { sensor: "GPS", level: "High", deadline_tick: deadline },
  });
}

function snapshotLine(tick: number): string {
  return JSON.stringify({
    tick,
    kind: "StateSnapshot",
    payload: {
      aircraft: { position: [5, 0], altitude: 3000, airspeed: 120, heading: 90, waypoint_index: 1 },
      readings: { GPS: [15, 0], LIDAR: [5, 0], IMU: [5, 0] },
      assessments: {
        GPS: { error_value: 10, range: "Level2", implicated: true, reliable: false },
        LIDAR: { error_value: 0, range: "Normal", implicated: false, reliable: true },
        IMU: { error_value: 0, range: "Normal", implicated: false, reliable: true },
      },
      ambiguous: false,
      authority: { active: "GPS", recommended: "LIDAR" },
      alert: null,
    },
  });
}

function fold(lines: string[]) {
  return lines.map(parseServerLine).reduce((s, l) => applyLine(s, l), initialState());
}

async function waitFor(predicate: () => boolean, ms = 5000): Promise<void> {
  const deadline = Date.now() + ms;
  while (!predicate()) {
    if (Date.now() > deadline) throw new Error("timed out");
    await new Promise((r) => setTimeout(r, 10));
  }
}

describe("canSubmit", () => {
  it("requires an open alert with time left and no prior response", () => {
    expect(canSubmit(initialState(), false)).toBe(false);
    const open = fold([headerLine, alertLine(10, 20)]);
    expect(canSubmit(open, false)).toBe(true);
    expect(canSubmit(open, true)).toBe(false);
  });

  it("refuses once the window has closed", () => {
    const expired = fold([headerLine, alertLine(10, 20), snapshotLine(20)]);
    expect(canSubmit(expired, false)).toBe(false);
  });
});

describe("ConsoleClient over a socket", () => {
  let server: net.Server | null = null;
  let client: ConsoleClient | null = null;
  let conn: net.Socket | null = null;
  const received: string[] = [];

  afterEach(async () => {
    client?.close();
    await new Promise<void>((resolve) => (server ? server.close(() => resolve()) : resolve()));
    server = null;
    client = null;
    conn = null;
    received.length = 0;
  });

  async function startFixtureServer(lines: string[]): Promise<number> {
    server = net.createServer((socket) => {
      conn = socket;
      socket.write(lines.map((l) => l + "\n").join(""));
      let buf = "";
      socket.on("data", (chunk) => {
        buf += chunk.toString();
        let idx: number;
        while ((idx = buf.indexOf("\n")) >= 0) {
          received.push(buf.slice(0, idx));
          buf = buf.slice(idx + 1);
        }
      });
    });
    await new Promise<void>((resolve) => server!.listen(0, "127.0.0.1", resolve));
    return (server.address() as AddressInfo).port;
  }

  it("sends exactly one response per alert and re-arms on the next one", async () => {
    const port = await startFixtureServer([headerLine, alertLine(10, 20)]);
    client = await ConsoleClient.connect("127.0.0.1", port);
    await waitFor(() => client!.state.alert !== null);

    expect(client.submitResponse("agree")).toBe(true);
    expect(client.submitResponse("disagree")).toBe(false); // single-shot
    await waitFor(() => received.length === 1);
    expect(JSON.parse(received[0]!)).toEqual({ type: "pilot_response", response: "agree" });

    const resolved = JSON.stringify({
      tick: 11,
      kind: "AlertResolved",
      payload: { sensor: "GPS", level: "High", response: "Agree" },
    });
    conn!.write(resolved + "\n" + alertLine(30, 40) + "\n");
    await waitFor(() => client!.state.alert?.openedTick === 30);

    expect(client.submitResponse("disagree")).toBe(true);
    await waitFor(() => received.length === 2);
    expect(JSON.parse(received[1]!)).toEqual({ type: "pilot_response", response: "disagree" });
  });

  it("refuses to submit after the local countdown reaches zero", async () => {
    const port = await startFixtureServer([headerLine, alertLine(10, 20), snapshotLine(25)]);
    client = await ConsoleClient.connect("127.0.0.1", port);
    await waitFor(() => client!.state.latestTick === 25);

    expect(client.submitResponse("agree")).toBe(false);
    expect(received).toHaveLength(0);
  });

  it("sends commands without gating", async () => {
    const port = await startFixtureServer([headerLine]);
    client = await ConsoleClient.connect("127.0.0.1", port);
    client.sendCommand("initiate_landing");
    await waitFor(() => received.length === 1);
    expect(JSON.parse(received[0]!)).toEqual({ type: "command", name: "initiate_landing" });
  });
});
