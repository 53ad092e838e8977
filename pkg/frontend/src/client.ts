/**
 * TCP client for the simulator's interactive endpoint.
 *
 * Owns the line framing and the single-shot response rule: Agree/Disagree is
 * armed by an AlertOpened event, fires at most once per alert, and is refused
 * once the locally derived countdown reaches zero.
 */

import * as net from "node:net";

import {
  CommandName,
  PilotResponseChoice,
  ServerLine,
  commandMessage,
  parseServerLine,
  pilotResponseMessage,
} from "./protocol.js";
import { ConsoleState, ConsoleViewModel, applyLine, countdownSeconds, deriveView, initialState } from "./viewmodel.js";

/** True when an Agree/Disagree click should go out on the wire. */
export function canSubmit(state: ConsoleState, alreadyResponded: boolean): boolean {
  if (alreadyResponded || state.alert === null || state.header === null) return false;
  return countdownSeconds(state.alert, state.latestTick, state.header.config.tick_hz) > 0;
}

export class ConsoleClient {
  private buffer = "";
  private responded = false;
  state: ConsoleState = initialState();
  onLine: ((line: ServerLine) => void) | null = null;
  onClose: (() => void) | null = null;

  private constructor(private readonly socket: net.Socket) {
    socket.setEncoding("utf-8");
    socket.on("data", (chunk: string) => this.handleData(chunk));
    socket.on("close", () => this.onClose?.());
  }

  static connect(host: string, port: number): Promise<ConsoleClient> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port }, () => {
        socket.off("error", reject);
        resolve(new ConsoleClient(socket));
      });
      socket.once("error", reject);
    });
  }

  private handleData(chunk: string): void {
    this.buffer += chunk;
    let idx: number;
    while ((idx = this.buffer.indexOf("\n")) >= 0) {
      const raw = this.buffer.slice(0, idx).trim();
      this.buffer = this.buffer.slice(idx + 1);
      if (!raw) continue;
      let line: ServerLine;
      try {
        line = parseServerLine(raw);
      } catch {
        continue;
      }
      if (line.type === "event" && line.event.kind === "AlertOpened") {
        this.responded = false; // re-arm the buttons for the new alert
      }
      this.state = applyLine(this.state, line);
      this.onLine?.(line);
    }
  }

  get view(): ConsoleViewModel {
    return deriveView(this.state);
  }

  /** Send Agree/Disagree once per alert; returns whether anything went out. */
  submitResponse(response: PilotResponseChoice): boolean {
    if (!canSubmit(this.state, this.responded)) return false;
    this.responded = true;
    this.socket.write(pilotResponseMessage(response) + "\n");
    return true;
  }

  sendCommand(name: CommandName): void {
    this.socket.write(commandMessage(name) + "\n");
  }

  close(): void {
    this.socket.destroy();
  }
}
