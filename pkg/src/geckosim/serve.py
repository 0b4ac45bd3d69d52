"""Live console link: the world ticking in real time behind a WebSocket.

Transport is one JSON object per text frame, newline terminated. Any number
of viewers may watch; exactly one client at a time holds the commander role
and may send gripper commands or reset the world.
"""

from __future__ import annotations

import json
import socket
import threading
from typing import Dict, List, Optional

from . import netframe
from .bridge import COMMAND_NAMES, DeviceError, HostCommandError, PacBridge
from .config import ScenarioConfig
from .firmware import AutoState
from .records import ExperimentRecord
from .scenario import World

PROTOCOL_VERSION = 1


class Client:
    def __init__(self, sock: socket.socket, addr):
        self.sock = sock
        self.addr = addr
        self.role = "viewer"
        self.alive = True
        self._tx = threading.Lock()

    def send(self, obj: Dict) -> bool:
        if not self.alive:
            return False
        try:
            with self._tx:
                netframe.send_text(self.sock, json.dumps(obj) + "\n")
            return True
        except OSError:
            self.alive = False
            return False


class SimServer:
    """Owns one World, one listener socket, and the tick clock."""

    def __init__(self, cfg: ScenarioConfig, host: str = "127.0.0.1",
                 port: int = 8765, speed: float = 1.0):
        self.cfg = cfg
        self.host = host
        self.speed = max(0.01, speed)
        self._lock = threading.RLock()
        self.world = World(cfg)
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind((host, port))
        self._listener.listen(8)
        self.port = self._listener.getsockname()[1]
        self._clients: List[Client] = []
        self._commander: Optional[Client] = None
        self._running = False
        self._threads: List[threading.Thread] = []

    # -- lifecycle -------------------------------------------------------

    def start(self) -> None:
        self._running = True
        for target in (self._accept_loop, self._tick_loop):
            t = threading.Thread(target=target, daemon=True)
            t.start()
            self._threads.append(t)

    def stop(self) -> None:
        self._running = False
        try:
            self._listener.close()
        except OSError:
            pass
        for client in list(self._clients):
            self._drop(client)

    def serve_forever(self) -> None:
        self.start()
        try:
            while self._running:
                threading.Event().wait(0.5)
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()

    # -- world loop --------------------------------------------------------

    def _tick_loop(self) -> None:
        period = self.cfg.tick_ms / 1000.0 / self.speed
        wake = threading.Event()
        while self._running:
            with self._lock:
                self.world.tick()
                frame = self._telemetry()
            for client in list(self._clients):
                if not client.send(frame):
                    self._drop(client)
            wake.wait(period)

    def _telemetry(self) -> Dict:
        w = self.world
        fw = w.firmware
        sample = w.sense()
        return {
            "type": "telemetry",
            "t_ms": w.now_ms,
            "x_m": round(w.state.x, 6),
            "y_m": round(w.state.y, 6),
            "theta_rad": round(w.state.theta, 6),
            "vx_m_s": round(w.state.vx, 6),
            "gap_mm": round(w.surface.gap_mm(w.state), 3),
            "tof_mm": sample.distance_mm,
            "tof_valid": sample.valid,
            "currents_mA": list(w.currents_mA()),
            "status": fw.status_register(),
            "auto_fsm": fw.auto_fsm.value,
            "grasp_delay_ms": fw.grasp_delay_ms,
            "pinned": w.state.pinned,
            "perched": w.perched,
        }

    # -- connections ------------------------------------------------------

    def _accept_loop(self) -> None:
        while self._running:
            try:
                sock, addr = self._listener.accept()
            except OSError:
                return
            t = threading.Thread(target=self._client_loop, args=(sock, addr),
                                 daemon=True)
            t.start()

    def _drop(self, client: Client) -> None:
        client.alive = False
        if client in self._clients:
            self._clients.remove(client)
        if self._commander is client:
            self._commander = None
        try:
            client.sock.close()
        except OSError:
            pass

    def _client_loop(self, sock: socket.socket, addr) -> None:
        try:
            netframe.server_handshake(sock)
        except (netframe.HandshakeError, OSError):
            sock.close()
            return
        client = Client(sock, addr)
        try:
            self._converse(client)
        except (netframe.ConnectionClosed, OSError, json.JSONDecodeError):
            pass
        finally:
            self._drop(client)

    def _converse(self, client: Client) -> None:
        while self._running and client.alive:
            text = netframe.read_message(client.sock)
            if text is None:
                return
            try:
                msg = json.loads(text)
            except json.JSONDecodeError:
                client.send({"type": "err", "error": "bad-json"})
                continue
            self._dispatch(client, msg)

    def _dispatch(self, client: Client, msg: Dict) -> None:
        kind = msg.get("type")
        msg_id = msg.get("id")
        if kind == "hello":
            self._hello(client, msg)
            return
        if client not in self._clients:
            client.send({"type": "err", "id": msg_id, "error": "hello-first"})
            return
        if kind == "cmd":
            self._command(client, msg)
        elif kind == "drip":
            self._drip(client, msg)
        elif kind == "experiments":
            with self._lock:
                ids = self.world.firmware.store.experiment_ids()
            client.send({"type": "experiments", "id": msg_id, "experiments": ids})
        elif kind == "reset":
            if client is not self._commander:
                client.send({"type": "err", "id": msg_id, "error": "not-commander"})
                return
            with self._lock:
                self.world = World(self.cfg)
            client.send({"type": "ack", "id": msg_id, "reset": True})
        else:
            client.send({"type": "err", "id": msg_id, "error": "unknown-type"})

    def _hello(self, client: Client, msg: Dict) -> None:
        wanted = msg.get("role", "viewer")
        note = None
        if wanted == "commander":
            if self._commander is None or not self._commander.alive:
                self._commander = client
                client.role = "commander"
            else:
                note = "commander-busy"
        reply = {
            "type": "hello",
            "version": PROTOCOL_VERSION,
            "role": client.role,
            "tick_ms": self.cfg.tick_ms,
            "commands": list(COMMAND_NAMES),
        }
        if note:
            reply["note"] = note
        if client not in self._clients:
            self._clients.append(client)
        client.send(reply)

    def _command(self, client: Client, msg: Dict) -> None:
        msg_id = msg.get("id")
        if client is not self._commander:
            client.send({"type": "err", "id": msg_id, "error": "not-commander"})
            return
        name = msg.get("name", "")
        param = msg.get("param")
        if param is not None and not isinstance(param, int):
            client.send({"type": "err", "id": msg_id, "error": "param-not-integer"})
            return
        try:
            with self._lock:
                result = self.world.bridge.send(name, param)
                status = self.world.firmware.status_register()
        except HostCommandError as exc:
            client.send({"type": "err", "id": msg_id, "error": str(exc)})
            return
        except DeviceError as exc:
            client.send({"type": "err", "id": msg_id, "error": f"device: {exc}"})
            return
        ack = {"type": "ack", "id": msg_id, "name": name, "status": status}
        if isinstance(result, bytes):
            ack["record"] = result.hex()
        client.send(ack)

    def _drip(self, client: Client, msg: Dict) -> None:
        msg_id = msg.get("id")
        exp = msg.get("experiment")
        if not isinstance(exp, int) or not 0 < exp <= 0xFFFF:
            client.send({"type": "err", "id": msg_id, "error": "bad-experiment"})
            return
        with self._lock:
            records = self.world.bridge.slow_drip(exp)
        client.send({
            "type": "records",
            "id": msg_id,
            "experiment": exp,
            "count": len(records),
            "records": [r.hex() for r in records],
            "decoded": [ExperimentRecord.decode(r).as_dict() for r in records],
        })
