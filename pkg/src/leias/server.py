"""Interactive mode: the engine ticks in real time while a TCP endpoint
streams trace events to connected consoles and accepts pilot responses.

Wire format is newline-delimited JSON. Server -> client lines mirror trace
events verbatim ({"tick","kind","payload"}); client -> server lines are
{"type":"pilot_response","response":"agree"|"disagree"} and
{"type":"command","name":"stop"|"initiate_landing"}.
"""

from __future__ import annotations

import json
import queue
import socket
import socketserver
import threading
import time
from pathlib import Path
from typing import Optional

from .config import ScenarioConfig
from .engine import ResponseWithoutAlertError, engine_step, initial_state
from .flightsim import route_complete
from .model import PilotResponse
from .rng import Rng
from .trace import TraceWriter, dumps_canonical, event_line, make_header


class PortBindError(OSError):
    pass


class ProtocolError(ValueError):
    pass


def _parse_client_message(line: str):
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"not JSON: {exc}") from exc
    if not isinstance(msg, dict):
        raise ProtocolError("message must be an object")
    mtype = msg.get("type")
    if mtype == "pilot_response":
        response = msg.get("response")
        if response not in ("agree", "disagree"):
            raise ProtocolError(f"bad response {response!r}")
        return PilotResponse.AGREE if response == "agree" else PilotResponse.DISAGREE
    if mtype == "command":
        name = msg.get("name")
        if name not in ("stop", "initiate_landing"):
            raise ProtocolError(f"bad command {name!r}")
        return name
    raise ProtocolError(f"bad message type {msg.get('type')!r}")


class InteractiveServer:
    """Engine ticker plus broadcast endpoint; the ticker thread is the only
    writer of engine state, clients only feed the inbound queue."""

    def __init__(self, config: ScenarioConfig, port: int, trace_path: str | Path,
                 host: str = "127.0.0.1", realtime: bool = True):
        self.config = config
        self.realtime = realtime
        self._inbound: queue.Queue = queue.Queue()
        self._clients: list[socket.socket] = []
        self._clients_lock = threading.Lock()
        self._stop = threading.Event()
        self._trace_path = Path(trace_path)
        try:
            self._listener = socket.create_server((host, port))
        except OSError as exc:
            raise PortBindError(f"cannot bind {host}:{port}: {exc}") from exc
        self.port = self._listener.getsockname()[1]
        self._header = make_header("interactive", config.to_json_dict(), config.seed)

    def _broadcast(self, line: str) -> None:
        data = (line + "\n").encode()
        with self._clients_lock:
            for client in list(self._clients):
                try:
                    client.sendall(data)
                except OSError:
                    self._clients.remove(client)

    def _handle_client(self, conn: socket.socket) -> None:
        with self._clients_lock:
            self._clients.append(conn)
        try:
            # New clients get the run header first so they can derive tick
            # rate and threshold bands without out-of-band configuration.
            conn.sendall((dumps_canonical(self._header) + "\n").encode())
            buf = b""
            while not self._stop.is_set():
                chunk = conn.recv(4096)
                if not chunk:
                    break
                buf += chunk
                while b"\n" in buf:
                    raw, buf = buf.split(b"\n", 1)
                    if not raw.strip():
                        continue
                    try:
                        parsed = _parse_client_message(raw.decode())
                    except ProtocolError as exc:
                        try:
                            conn.sendall(
                                (json.dumps({"type": "error", "message": str(exc)}) + "\n").encode()
                            )
                        except OSError:
                            pass
                        continue
                    if parsed in ("stop", "initiate_landing"):
                        self._stop.set()
                    else:
                        self._inbound.put(parsed)
        except OSError:
            pass
        finally:
            with self._clients_lock:
                if conn in self._clients:
                    self._clients.remove(conn)
            conn.close()

    def _accept_loop(self) -> None:
        # The engine may finish and close the listener before this thread runs.
        try:
            self._listener.settimeout(0.2)
        except OSError:
            return
        while not self._stop.is_set():
            try:
                conn, _ = self._listener.accept()
            except socket.timeout:
                continue
            except OSError:
                break
            threading.Thread(target=self._handle_client, args=(conn,), daemon=True).start()

    def run(self) -> int:
        """Tick until route completion or a stop command; returns exit status."""
        accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        accept_thread.start()
        rng = Rng(self.config.seed)
        state = initial_state(self.config)
        dt = 1.0 / self.config.tick_hz
        with open(self._trace_path, "w", encoding="utf-8", newline="\n") as fh:
            writer = TraceWriter(fh, self._header)
            while not self._stop.is_set() and state.tick < self.config.max_ticks:
                started = time.monotonic()
                pilot_input: Optional[PilotResponse] = None
                try:
                    pilot_input = self._inbound.get_nowait()
                except queue.Empty:
                    pass
                try:
                    state, events = engine_step(state, pilot_input, self.config, rng)
                except ResponseWithoutAlertError as exc:
                    self._broadcast(json.dumps({"type": "error", "message": str(exc)}))
                    state, events = engine_step(state, None, self.config, rng)
                for event in events:
                    writer.write(event)
                    self._broadcast(event_line(event))
                if route_complete(state.aircraft, self.config.waypoints):
                    break
                if self.realtime:
                    elapsed = time.monotonic() - started
                    time.sleep(max(0.0, dt - elapsed))
        self._stop.set()
        self._listener.close()
        with self._clients_lock:
            for client in self._clients:
                client.close()
            self._clients.clear()
        return 0
