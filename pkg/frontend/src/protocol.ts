/**
 * Wire protocol for the simulator's interactive endpoint.
 *
 * The server speaks newline-delimited JSON: the first line on connect is the
 * run header, every following line is a trace event {tick, kind, payload} or
 * an {"type":"error"} notice. The client sends pilot_response and command
 * messages in the same framing.
 */

import { z } from "zod";

export const SENSORS = ["GPS", "LIDAR", "IMU"] as const;
export type Sensor = (typeof SENSORS)[number];

export const LEVELS = ["Low", "High"] as const;
export type Level = (typeof LEVELS)[number];

export type BarColor = "Red" | "Green" | "White";

const sensorSchema = z.enum(SENSORS);
const colorSchema = z.enum(["Red", "Green", "White"]);
const xy = z.tuple([z.number(), z.number()]);

export const headerSchema = z
  .object({
    version: z.string(),
    mode: z.string(),
    seed: z.number(),
    config: z
      .object({
        waypoints: z.array(xy).min(1),
        tick_hz: z.number().positive(),
        thresholds: z.object({ t1: z.number(), t2: z.number(), t3: z.number() }),
        response_window_s: z.number().positive(),
      })
      .passthrough(),
  })
  .passthrough();

export type RunHeader = z.infer<typeof headerSchema>;

const assessmentSchema = z.object({
  error_value: z.number(),
  range: z.enum(["Normal", "Level1", "Level2", "Safety"]),
  implicated: z.boolean(),
  reliable: z.boolean(),
});

const perSensor = <T extends z.ZodTypeAny>(value: T) =>
  z.object({ GPS: value, LIDAR: value, IMU: value });

export const snapshotPayloadSchema = z.object({
  aircraft: z.object({
    position: xy,
    altitude: z.number(),
    airspeed: z.number(),
    heading: z.number(),
    waypoint_index: z.number().int().nonnegative(),
  }),
  readings: perSensor(xy),
  assessments: perSensor(assessmentSchema),
  ambiguous: z.boolean(),
  authority: z.object({ active: sensorSchema, recommended: sensorSchema.nullable() }),
  alert: z
    .object({
      sensor: sensorSchema,
      level: z.string(),
      opened_tick: z.number().int(),
      deadline_tick: z.number().int(),
      response: z.string(),
      resolved: z.boolean(),
    })
    .nullable(),
});

export type SnapshotPayload = z.infer<typeof snapshotPayloadSchema>;

const tick = z.number().int().nonnegative();

export const eventSchema = z.discriminatedUnion("kind", [
  z.object({
    tick,
    kind: z.literal("AlertOpened"),
    payload: z.object({
      sensor: sensorSchema,
      level: z.enum(["Low", "High", "Mandatory"]),
      deadline_tick: z.number().int(),
    }),
  }),
  z.object({
    tick,
    kind: z.literal("PilotResponded"),
    payload: z.object({ response: z.enum(["Agree", "Disagree"]) }),
  }),
  z.object({
    tick,
    kind: z.literal("AlertResolved"),
    payload: z.object({
      sensor: sensorSchema,
      level: z.string(),
      response: z.enum(["Agree", "Disagree", "Neutral"]),
    }),
  }),
  z.object({
    tick,
    kind: z.literal("RewardApplied"),
    payload: z.object({
      sensor: sensorSchema,
      level: z.string(),
      action: z.enum(["Warn", "DoNotWarn"]),
      reward: z.number(),
      q_after: z.number(),
    }),
  }),
  z.object({
    tick,
    kind: z.literal("SensorSwitched"),
    payload: z.object({
      from: sensorSchema,
      to: sensorSchema,
      cause: z.enum(["agree", "timeout"]),
    }),
  }),
  z.object({
    tick,
    kind: z.literal("PolicyUpdated"),
    payload: z.object({
      q: z.record(z.string(), z.number()),
      colors: z.record(z.string(), colorSchema),
    }),
  }),
  z.object({ tick, kind: z.literal("StateSnapshot"), payload: snapshotPayloadSchema }),
]);

export type TraceEvent = z.infer<typeof eventSchema>;

export type ServerLine =
  | { type: "header"; header: RunHeader }
  | { type: "event"; event: TraceEvent }
  | { type: "error"; message: string };

/** Classify and validate one newline-delimited line from the server. */
export function parseServerLine(raw: string): ServerLine {
  let obj: unknown;
  try {
    obj = JSON.parse(raw);
  } catch {
    throw new Error(`unparseable server line: ${raw.slice(0, 120)}`);
  }
  if (typeof obj !== "object" || obj === null) {
    throw new Error("server line is not an object");
  }
  const rec = obj as Record<string, unknown>;
  if ("kind" in rec) {
    return { type: "event", event: eventSchema.parse(rec) };
  }
  if (rec["type"] === "error") {
    return { type: "error", message: String(rec["message"] ?? "") };
  }
  return { type: "header", header: headerSchema.parse(rec) };
}

export type PilotResponseChoice = "agree" | "disagree";
export type CommandName = "stop" | "initiate_landing";

export function pilotResponseMessage(response: PilotResponseChoice): string {
  return JSON.stringify({ type: "pilot_response", response });
}

export function commandMessage(name: CommandName): string {
  return JSON.stringify({ type: "command", name });
}
