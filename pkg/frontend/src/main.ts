/**
 * Entry point: connect to a live `leias run` endpoint and drive the terminal
 * console. Keys: a = Agree, d = Disagree, l = Initiate Landing, q = quit.
 */

import { parseArgs } from "node:util";

import { ConsoleClient } from "./client.js";
import { renderView } from "./ui.js";

async function main(): Promise<void> {
  const { values } = parseArgs({
    options: {
      host: { type: "string", default: "127.0.0.1" },
      port: { type: "string" },
    },
  });
  if (!values.port) {
    console.error("usage: main.js --port <port> [--host <host>]");
    process.exit(2);
  }

  const client = await ConsoleClient.connect(values.host!, Number(values.port));
  client.onClose = () => {
    process.stdout.write("\nserver closed the connection\n");
    process.exit(0);
  };
  client.onLine = (line) => {
    if (line.type === "error") {
      process.stdout.write(`\nserver: ${line.message}\n`);
      return;
    }
    if (line.type === "event" && line.event.kind === "StateSnapshot") {
      process.stdout.write("\x1b[2J\x1b[H" + renderView(client.view) + "\n");
    }
  };

  if (process.stdin.isTTY) {
    process.stdin.setRawMode(true);
  }
  process.stdin.resume();
  process.stdin.setEncoding("utf-8");
  process.stdin.on("data", (key: string) => {
    if (key === "a") client.submitResponse("agree");
    else if (key === "d") client.submitResponse("disagree");
    else if (key === "l") client.sendCommand("initiate_landing");
    else if (key === "q" || key === "\u0003") {
      client.close();
      process.exit(0);
    }
  });
}

main().catch((err) => {
  console.error(err instanceof Error ? err.message : err);
  process.exit(1);
});
