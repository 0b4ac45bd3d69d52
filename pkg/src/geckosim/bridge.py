"""Host-side command dispatch: names in, bus transactions out.

This mirrors the helper the flight software used to poke the gripper from
the payload computer. Commands are the operator vocabulary; two of them
(STATUS, RECORD) are pure reads, the rest write the command register.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from . import firmware as fw
from .bus import Bus, BusTimeout
from .protocol import ChecksumError, StatusPacket, read_request, write_request
from .records import RECORD_SIZE, ExperimentRecord, split_records


class HostCommandError(Exception):
    """Unknown command name or malformed parameter."""


class DeviceError(Exception):
    """The gripper acked with error flags set."""

    def __init__(self, flags: int):
        super().__init__(f"device error flags {flags:#04x}")
        self.flags = flags


# name -> (code, takes_param). STATUS and RECORD are read transactions.
COMMAND_CODES: Dict[str, Tuple[int, bool]] = {
    "OPEN": (fw.CMD_OPEN, False),
    "CLOSE": (fw.CMD_CLOSE, False),
    "TOGGLE AUTO": (fw.CMD_TOGGLE_AUTO, False),
    "MARK": (fw.CMD_MARK, True),
    "ENGAGE": (fw.CMD_ENGAGE, False),
    "DISENGAGE": (fw.CMD_DISENGAGE, False),
    "LOCK": (fw.CMD_LOCK, False),
    "UNLOCK": (fw.CMD_UNLOCK, False),
    "ENABLE AUTO": (fw.CMD_ENABLE_AUTO, False),
    "DISABLE AUTO": (fw.CMD_DISABLE_AUTO, False),
    "SET DELAY": (fw.CMD_SET_DELAY, True),
    "OPEN EXP": (fw.CMD_OPEN_EXP, True),
    "CLOSE EXP": (fw.CMD_CLOSE_EXP, False),
    "NEXT RECORD": (fw.CMD_NEXT_RECORD, True),
}

READ_COMMANDS = ("STATUS", "RECORD")
COMMAND_NAMES = tuple(COMMAND_CODES) + READ_COMMANDS


def normalize_name(name: str) -> str:
    return " ".join(name.replace("_", " ").replace("-", " ").upper().split())


@dataclass(frozen=True)
class HostCommand:
    name: str
    param: Optional[int] = None

    @classmethod
    def parse(cls, name: str, param: Optional[int] = None) -> "HostCommand":
        canon = normalize_name(name)
        if canon in READ_COMMANDS:
            if param not in (None, 0):
                raise HostCommandError(f"{canon} takes no parameter")
            return cls(canon, None)
        if canon not in COMMAND_CODES:
            raise HostCommandError(f"unknown command {name!r}")
        _, takes = COMMAND_CODES[canon]
        if takes:
            if param is None:
                raise HostCommandError(f"{canon} needs a parameter")
            if not isinstance(param, int) or not 0 <= param <= 0xFFFF:
                raise HostCommandError(f"{canon}: parameter must be u16, got {param!r}")
            return cls(canon, param)
        if param not in (None, 0):
            raise HostCommandError(f"{canon} takes no parameter")
        return cls(canon, None)


class PacBridge:
    """Issues gripper commands over the bus, one retry on a dead ack."""

    def __init__(self, bus: Bus, device_id: int = fw.DEFAULT_DEVICE_ID):
        self.bus = bus
        self.device_id = device_id

    def _transact(self, request) -> StatusPacket:
        try:
            return self.bus.transact(request)
        except (BusTimeout, ChecksumError):
            return self.bus.transact(request)

    def _ack(self, request) -> StatusPacket:
        resp = self._transact(request)
        if not resp.ok:
            raise DeviceError(resp.error_flags)
        return resp

    def send(self, name: str, param: Optional[int] = None) -> Union[int, bytes]:
        """Dispatch one named command; returns the status word or record."""
        cmd = HostCommand.parse(name, param)
        if cmd.name == "STATUS":
            return self.status()
        if cmd.name == "RECORD":
            return self.record_bytes()
        code, _ = COMMAND_CODES[cmd.name]
        value = cmd.param or 0
        payload = bytes([code, value & 0xFF, (value >> 8) & 0xFF])
        self._ack(write_request(self.device_id, fw.REG_COMMAND, payload))
        return self.status()

    def status(self) -> int:
        resp = self._ack(read_request(self.device_id, fw.REG_STATUS, 2))
        return resp.params[0] | (resp.params[1] << 8)

    def record_bytes(self) -> bytes:
        resp = self._ack(read_request(self.device_id, fw.REG_RECORD, RECORD_SIZE))
        return resp.params

    def log_end(self) -> bool:
        resp = self._ack(read_request(self.device_id, fw.REG_LOG_END, 1))
        return resp.params[0] != 0

    def slow_drip(self, experiment_id: int) -> List[bytes]:
        """Pull one experiment record by record over the bus.

        Safe to repeat: opening the file rewinds the cursor, so a second
        drip returns the identical byte stream.
        """
        self.send("OPEN EXP", experiment_id)
        try:
            if self.log_end():
                return []
            records = []
            while True:
                records.append(self.record_bytes())
                self.send("NEXT RECORD", 1)
                if self.log_end():
                    return records
        finally:
            self.send("CLOSE EXP")


def export_geckolog(out_dir: str, experiment_id: int, records: List[bytes]) -> Tuple[str, str]:
    """Write exp<NNN>.geckolog plus a decoded JSON sidecar; returns both paths."""
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.join(out_dir, f"exp{experiment_id:03d}")
    log_path = stem + ".geckolog"
    json_path = stem + ".json"
    raw = b"".join(records)
    with open(log_path, "wb") as fh:
        fh.write(raw)
    decoded = [ExperimentRecord.decode(chunk).as_dict() for chunk in records]
    sidecar = {
        "experiment_id": experiment_id,
        "record_count": len(records),
        "record_size": RECORD_SIZE,
        "records": decoded,
    }
    with open(json_path, "w") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")
    return (log_path, json_path)


def load_geckolog(path: str) -> List[ExperimentRecord]:
    with open(path, "rb") as fh:
        return [ExperimentRecord.decode(c) for c in split_records(fh.read())]
