/**
 * Terminal rendering of the console view model. Pure string building; the
 * caller decides when to repaint.
 */

import { BarColor } from "./protocol.js";
import { ConsoleViewModel } from "./viewmodel.js";

const ANSI: Record<BarColor, string> = {
  Red: "\x1b[41m",
  Green: "\x1b[42m",
  White: "\x1b[47m",
};
const RESET = "\x1b[0m";

function cell(color: BarColor): string {
  return `${ANSI[color]}  ${RESET}`;
}

function fmt(n: number | null, digits = 1): string {
  return n === null ? "---" : n.toFixed(digits);
}

export function renderView(view: ConsoleViewModel): string {
  const lines: string[] = [];

  lines.push("== LEIAS Pilot Console ==");
  lines.push(`alt ${fmt(view.altitude, 0)} ft   ias ${fmt(view.airspeed, 0)} kn`);

  for (const marker of view.markers) {
    const badge = marker.sensor === view.activeSensorBadge ? " [ACTIVE]" : "";
    lines.push(`  ${marker.sensor.padEnd(5)} (${marker.x.toFixed(1)}, ${marker.y.toFixed(1)})${badge}`);
  }
  if (view.waypoint) {
    lines.push(`  WPT   (${view.waypoint.x.toFixed(1)}, ${view.waypoint.y.toFixed(1)})`);
  }

  // Severity bar: green Normal cap, six learned cells, red Safety cap.
  const bars = [cell(view.bars.caps.normal), ...view.bars.cells.map((c) => cell(c.color)), cell(view.bars.caps.safety)];
  lines.push(`severity ${bars.join("")}`);
  for (const score of view.scores) {
    lines.push(`  ${score.sensor.padEnd(5)} ${score.label.padEnd(16)} ${score.value.toFixed(3)}`);
  }

  if (view.alert) {
    const icon = view.warningIcon ? "[!]" : "   ";
    lines.push(
      `${icon} ALERT ${view.alert.sensor} ${view.alert.severity}: position off ${view.alert.discrepancy} — ` +
        `respond within ${view.alert.countdownSeconds.toFixed(1)}s  (a)gree / (d)isagree`
    );
  } else {
    lines.push("no alert  —  (l) initiate landing, (q) quit");
  }

  return lines.join("\n");
}
