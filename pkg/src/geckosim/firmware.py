"""Gripper control program: command set, auto-grasp trigger, on-board log.

The firmware is a deterministic state machine advanced only by tick() and
execute_command(); callers serialize these. Time is integer milliseconds
supplied by the caller (the simulator or a test), never wall clock.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

from .bus import BusDevice
from .protocol import ERR_INSTRUCTION, StatusPacket
from .records import RECORD_SIZE, ExperimentRecord, split_records
from .registers import RO, RW, RegisterFile

# Command codes accepted by the command register (0x40).
CMD_OPEN = 0x01
CMD_CLOSE = 0x02
CMD_TOGGLE_AUTO = 0x03
CMD_MARK = 0x04
CMD_ENGAGE = 0x05
CMD_DISENGAGE = 0x06
CMD_LOCK = 0x07
CMD_UNLOCK = 0x08
CMD_ENABLE_AUTO = 0x09
CMD_DISABLE_AUTO = 0x0A
CMD_SET_DELAY = 0x0B
CMD_OPEN_EXP = 0x0C
CMD_CLOSE_EXP = 0x0D
CMD_NEXT_RECORD = 0x0E

COMMAND_NAMES = {
    CMD_OPEN: "OPEN",
    CMD_CLOSE: "CLOSE",
    CMD_TOGGLE_AUTO: "TOGGLE AUTO",
    CMD_MARK: "MARK",
    CMD_ENGAGE: "ENGAGE",
    CMD_DISENGAGE: "DISENGAGE",
    CMD_LOCK: "LOCK",
    CMD_UNLOCK: "UNLOCK",
    CMD_ENABLE_AUTO: "ENABLE AUTO",
    CMD_DISABLE_AUTO: "DISABLE AUTO",
    CMD_SET_DELAY: "SET DELAY",
    CMD_OPEN_EXP: "OPEN EXP",
    CMD_CLOSE_EXP: "CLOSE EXP",
    CMD_NEXT_RECORD: "NEXT RECORD",
}

# Register map (see docs/register_map.md).
REG_STATUS = 0x30      # u16, RO
REG_LOG_END = 0x32     # u8, RO: record cursor hit end of file
REG_COMMAND = 0x40     # u8, RW: command code
REG_PARAM = 0x41       # u16 LE, RW: command parameter
REG_RECORD = 0x50      # 35 bytes, RO: record at the read cursor
REGFILE_SIZE = 0x80

DEFAULT_DEVICE_ID = 0x20
DEFAULT_GRASP_DELAY_MS = 250
ARM_THRESHOLD_MM = 40.0
TOF_MIN_MM = 5.0
TOF_MAX_MM = 100.0
WRIST_RAMP_MS = 500
SERVO_TRAVEL = 1000  # commanded position counts, 0 = slack

STATUS_PAIR_A = 1 << 0
STATUS_PAIR_B = 1 << 1
STATUS_WRIST = 1 << 2
STATUS_AUTO = 1 << 3
STATUS_EXPERIMENT = 1 << 4


class CommandError(Exception):
    """Unknown command code written to the command register."""


class AutoState(Enum):
    IDLE = "idle"
    ARMED = "armed"
    SCHEDULED = "scheduled"


@dataclass(frozen=True)
class TofSample:
    """One ranging measurement; readings outside 5-100 mm are invalid."""

    distance_mm: float
    valid: bool
    timestamp_ms: int

    def __post_init__(self):
        if self.valid and not TOF_MIN_MM <= self.distance_mm <= TOF_MAX_MM:
            object.__setattr__(self, "valid", False)

    @classmethod
    def measure(cls, distance_mm: float, timestamp_ms: int) -> "TofSample":
        return cls(distance_mm, True, timestamp_ms)

    @classmethod
    def invalid(cls, timestamp_ms: int) -> "TofSample":
        return cls(0.0, False, timestamp_ms)


def estimate_time_to_contact(d_prev_mm: float, d_curr_mm: float, dt_s: float) -> Optional[float]:
    """Seconds to contact under constant closing speed, or None if not approaching."""
    v = (d_prev_mm - d_curr_mm) / dt_s
    if v <= 0.0:
        return None
    return d_curr_mm / v


class ExperimentStore:
    """Record storage, optionally mirrored to a directory of exp<NNN>.bin files."""

    _FILE_RE = re.compile(r"^exp(\d+)\.bin$")

    def __init__(self, sd_dir: Optional[str] = None):
        self.sd_dir = sd_dir
        self._logs: Dict[int, List[bytes]] = {}
        if sd_dir and os.path.isdir(sd_dir):
            for name in sorted(os.listdir(sd_dir)):
                m = self._FILE_RE.match(name)
                if not m:
                    continue
                with open(os.path.join(sd_dir, name), "rb") as fh:
                    self._logs[int(m.group(1))] = list(split_records(fh.read()))

    def begin(self, exp_id: int) -> None:
        self._logs[exp_id] = []

    def append(self, exp_id: int, raw: bytes) -> None:
        self._logs[exp_id].append(raw)

    def records(self, exp_id: int) -> List[bytes]:
        return self._logs.get(exp_id, [])

    def raw(self, exp_id: int) -> bytes:
        return b"".join(self.records(exp_id))

    def experiment_ids(self) -> List[int]:
        return sorted(self._logs)

    def flush(self, exp_id: Optional[int] = None) -> None:
        if not self.sd_dir:
            return
        os.makedirs(self.sd_dir, exist_ok=True)
        ids = [exp_id] if exp_id is not None else list(self._logs)
        for eid in ids:
            path = os.path.join(self.sd_dir, f"exp{eid:03d}.bin")
            with open(path, "wb") as fh:
                fh.write(self.raw(eid))


class GripperFirmware:
    """Table-driven gripper FSM with auto-grasp and experiment logging."""

    def __init__(
        self,
        device_id: int = DEFAULT_DEVICE_ID,
        grasp_delay_ms: int = DEFAULT_GRASP_DELAY_MS,
        sd_dir: Optional[str] = None,
    ):
        self.device_id = device_id
        self.grasp_delay_ms = grasp_delay_ms
        self.now_ms = 0

        self.pair_engaged = [False, False]
        self.wrist_locked = False
        self.auto_mode = False
        self.current_experiment = 0

        # Wrist timing: one pending delayed action plus an in-flight lock ramp.
        self._pending_wrist: Optional[Tuple[str, int]] = None
        self._lock_ramp_end: Optional[int] = None
        self._wrist_ramp: Optional[Tuple[int, float, int, float]] = None  # t0, p0, t1, p1
        self._wrist_pos = 0.0

        # Auto-grasp trigger: anchor = first valid sample below the arm
        # threshold; every later valid sample refreshes the fire time.
        self._anchor: Optional[Tuple[float, int]] = None
        self._fire_at: Optional[int] = None

        self._release_pulse = False
        self._log_seq = 0
        self.store = ExperimentStore(sd_dir)

        # Read cursor over a stored experiment (slow-drip source).
        self._read_exp: Optional[int] = None
        self._cursor = 0
        self._log_end = False

        # Physical-side hook: called with "engage"/"disengage" on transitions.
        self.actuator: Optional[Callable[[str], None]] = None

        self.regs = RegisterFile(REGFILE_SIZE, default_mode=RO)
        self.regs.set_mode(REG_COMMAND, 3, RW)
        self.regs.write_hook = self._on_register_write
        self._refresh_registers()

    # -- state summary ------------------------------------------------

    @property
    def auto_fsm(self) -> AutoState:
        if self._fire_at is not None:
            return AutoState.SCHEDULED
        if self._anchor is not None:
            return AutoState.ARMED
        return AutoState.IDLE

    def status_register(self) -> int:
        word = 0
        if self.pair_engaged[0]:
            word |= STATUS_PAIR_A
        if self.pair_engaged[1]:
            word |= STATUS_PAIR_B
        if self.wrist_locked:
            word |= STATUS_WRIST
        if self.auto_mode:
            word |= STATUS_AUTO
        if self.current_experiment != 0:
            word |= STATUS_EXPERIMENT
        return word

    def servo_commands(self) -> Tuple[int, int, int, int]:
        """Commanded positions: load A, load B, release, wrist."""
        load = SERVO_TRAVEL if any(self.pair_engaged) else 0
        release = SERVO_TRAVEL if self._release_pulse else 0
        return (load, load, release, int(round(self._wrist_pos)))

    # -- command execution ---------------------------------------------

    def execute_command(self, code: int, param: int = 0) -> None:
        if code == CMD_OPEN:
            self._do_disengage()
            self.auto_mode = False
            self._auto_reset()
            self._pending_wrist = ("unlock", self.now_ms + self.grasp_delay_ms)
        elif code == CMD_CLOSE:
            self._do_engage()
            self._pending_wrist = ("lock", self.now_ms + self.grasp_delay_ms)
        elif code == CMD_TOGGLE_AUTO:
            self.auto_mode = not self.auto_mode
            if not self.auto_mode:
                self._auto_reset()
        elif code == CMD_MARK:
            self._mark(param)
        elif code == CMD_ENGAGE:
            self._do_engage()
        elif code == CMD_DISENGAGE:
            self._do_disengage()
        elif code == CMD_LOCK:
            self._pending_wrist = None
            self._start_lock()
        elif code == CMD_UNLOCK:
            self._pending_wrist = None
            self._do_unlock()
        elif code == CMD_ENABLE_AUTO:
            self.auto_mode = True
        elif code == CMD_DISABLE_AUTO:
            self.auto_mode = False
            self._auto_reset()
        elif code == CMD_SET_DELAY:
            self.grasp_delay_ms = int(param)
        elif code == CMD_OPEN_EXP:
            self._open_exp(param)
        elif code == CMD_CLOSE_EXP:
            self._close_exp()
        elif code == CMD_NEXT_RECORD:
            self._seek(param)
        else:
            raise CommandError(f"unknown command code {code:#04x}")
        self._refresh_registers()

    def _do_engage(self) -> None:
        if not all(self.pair_engaged):
            self.pair_engaged = [True, True]
            if self.actuator:
                self.actuator("engage")

    def _do_disengage(self) -> None:
        if any(self.pair_engaged):
            self.pair_engaged = [False, False]
            self._release_pulse = True
            if self.actuator:
                self.actuator("disengage")

    def _start_lock(self) -> None:
        if self.wrist_locked or self._lock_ramp_end is not None:
            return
        self._lock_ramp_end = self.now_ms + WRIST_RAMP_MS
        self._wrist_ramp = (self.now_ms, self._wrist_pos, self._lock_ramp_end, SERVO_TRAVEL)

    def _do_unlock(self) -> None:
        self.wrist_locked = False
        self._lock_ramp_end = None
        self._wrist_ramp = (self.now_ms, self._wrist_pos, self.now_ms + WRIST_RAMP_MS, 0.0)

    def _auto_reset(self) -> None:
        self._anchor = None
        self._fire_at = None

    def _mark(self, exp_id: int) -> None:
        if exp_id == 0:
            if self.current_experiment != 0:
                self.store.flush(self.current_experiment)
                self.current_experiment = 0
            return
        if self.current_experiment != 0:
            self.store.flush(self.current_experiment)
        self.current_experiment = exp_id
        self._log_seq = 0
        self.store.begin(exp_id)

    def _open_exp(self, exp_id: int) -> None:
        self._read_exp = exp_id
        self._cursor = 0
        self._log_end = len(self.store.records(exp_id)) == 0

    def _close_exp(self) -> None:
        self._read_exp = None
        self._cursor = 0
        self._log_end = False

    def _seek(self, count: int) -> None:
        if self._read_exp is None:
            return
        n = len(self.store.records(self._read_exp))
        target = self._cursor + count
        last = max(n - 1, 0)
        if target > last:
            self._cursor = last
            self._log_end = True
        else:
            self._cursor = target

    def read_record(self) -> bytes:
        """Record at the read cursor; zeros with no open (or empty) file."""
        if self._read_exp is None:
            return bytes(RECORD_SIZE)
        recs = self.store.records(self._read_exp)
        if not recs:
            return bytes(RECORD_SIZE)
        # the file can shrink under the cursor if logging reuses this
        # experiment number while it is open for reading
        return recs[min(self._cursor, len(recs) - 1)]

    @property
    def log_end(self) -> bool:
        return self._log_end

    # -- periodic loop ---------------------------------------------------

    def tick(
        self,
        now_ms: int,
        tof: Optional[TofSample] = None,
        currents_mA: Tuple[int, int, int, int] = (0, 0, 0, 0),
    ) -> Optional[ExperimentRecord]:
        self.now_ms = now_ms
        self._release_pulse = False

        if self._pending_wrist and now_ms >= self._pending_wrist[1]:
            action = self._pending_wrist[0]
            self._pending_wrist = None
            if action == "lock":
                self._start_lock()
            else:
                self._do_unlock()

        if self._lock_ramp_end is not None and now_ms >= self._lock_ramp_end:
            self.wrist_locked = True
            self._lock_ramp_end = None

        self._auto_tick(tof, now_ms)

        if self._wrist_ramp:
            t0, p0, t1, p1 = self._wrist_ramp
            if now_ms >= t1:
                self._wrist_pos = p1
                self._wrist_ramp = None
            else:
                self._wrist_pos = p0 + (p1 - p0) * (now_ms - t0) / (t1 - t0)

        record = None
        if self.current_experiment != 0:
            record = self._log(tof, currents_mA, now_ms)

        self._refresh_registers()
        return record

    def _auto_tick(self, tof: Optional[TofSample], now_ms: int) -> None:
        if not self.auto_mode:
            return
        if self._fire_at is not None and now_ms >= self._fire_at:
            # Open-loop engagement, then the CLOSE wrist-lock sequence.
            self._do_engage()
            self._pending_wrist = ("lock", now_ms + self.grasp_delay_ms)
            self._auto_reset()
            return
        if any(self.pair_engaged):
            return
        if tof is None or not tof.valid:
            return  # keep any schedule: open-loop commitment
        d, t = tof.distance_mm, tof.timestamp_ms
        if d >= ARM_THRESHOLD_MM:
            self._anchor = None
            return
        if self._anchor is None:
            self._anchor = (d, t)
            return
        d0, t0 = self._anchor
        if t <= t0:
            return
        ttc = estimate_time_to_contact(d0, d, (t - t0) / 1000.0)
        if ttc is not None:
            self._fire_at = now_ms + int(round(ttc * 1000.0)) + self.grasp_delay_ms

    def _log(self, tof, currents_mA, now_ms) -> ExperimentRecord:
        if tof is None:
            tof_mm, tof_valid = 0, False
        else:
            tof_mm = max(0, min(0xFFFF, int(round(tof.distance_mm))))
            tof_valid = tof.valid
        record = ExperimentRecord(
            seq=self._log_seq,
            timestamp_ms=now_ms & 0xFFFFFFFF,
            experiment_id=self.current_experiment,
            tof_mm=tof_mm,
            tof_valid=tof_valid,
            servo_current_mA=tuple(int(c) & 0xFFFF for c in currents_mA),
            servo_command=self.servo_commands(),
            status=self.status_register(),
            grasp_delay_ms=self.grasp_delay_ms & 0xFFFF,
        )
        self._log_seq += 1
        self.store.append(self.current_experiment, record.encode())
        return record

    # -- bus-facing register interface ------------------------------------

    def _on_register_write(self, start: int, payload: bytes) -> None:
        if start <= REG_COMMAND < start + len(payload):
            code = self.regs.read(REG_COMMAND, 1)[0]
            param = self.regs.read_u16(REG_PARAM)
            self.execute_command(code, param)

    def _refresh_registers(self) -> None:
        self.regs.poke_u16(REG_STATUS, self.status_register())
        self.regs.poke(REG_LOG_END, bytes([1 if self._log_end else 0]))
        self.regs.poke(REG_RECORD, self.read_record())

    def flush(self) -> None:
        self.store.flush()


def register_map_markdown() -> str:
    """Render the register map and command table from the source constants.

    docs/register_map.md is this function's output, committed; a test keeps
    the two in sync so the doc can never drift from the firmware.
    """
    lines = [
        "# Gripper register map",
        "",
        f"The gripper answers at bus id {DEFAULT_DEVICE_ID:#04x} with a "
        f"{REGFILE_SIZE}-byte register file. All multi-byte fields are "
        "little-endian. Writes outside the command window come back with "
        "the address error flag.",
        "",
        "| address | name | size | access | contents |",
        "|---------|------|------|--------|----------|",
        f"| {REG_STATUS:#04x} | STATUS | 2 | RO | status word, see bits below |",
        f"| {REG_LOG_END:#04x} | LOG_END | 1 | RO | 1 when the record cursor hit end of file |",
        f"| {REG_COMMAND:#04x} | COMMAND | 1 | RW | command code, executes on write |",
        f"| {REG_PARAM:#04x} | PARAM | 2 | RW | u16 command parameter |",
        f"| {REG_RECORD:#04x} | RECORD | {RECORD_SIZE} | RO | record at the read cursor |",
        "",
        "Write COMMAND and PARAM in a single 3-byte write so the parameter",
        "is in place when the command executes.",
        "",
        "## Status word bits",
        "",
        "| bit | mask | meaning |",
        "|-----|------|---------|",
        f"| 0 | {STATUS_PAIR_A:#06x} | tile pair A commanded engaged |",
        f"| 1 | {STATUS_PAIR_B:#06x} | tile pair B commanded engaged |",
        f"| 2 | {STATUS_WRIST:#06x} | wrist locked (set at lock ramp end) |",
        f"| 3 | {STATUS_AUTO:#06x} | automatic grasping armed |",
        f"| 4 | {STATUS_EXPERIMENT:#06x} | experiment logging in progress |",
        "",
        "## Command codes",
        "",
        "| code | command |",
        "|------|---------|",
    ]
    for code in sorted(COMMAND_NAMES):
        lines.append(f"| {code:#04x} | {COMMAND_NAMES[code]} |")
    lines += [
        "",
        "STATUS and RECORD are reads of their registers, not command codes.",
        "",
    ]
    return "\n".join(lines)


class GripperDevice(BusDevice):
    """The gripper as a virtual servo on the arm bus."""

    def __init__(self, firmware: GripperFirmware):
        super().__init__(firmware.device_id, firmware.regs)
        self.firmware = firmware

    def handle(self, request) -> StatusPacket:
        try:
            return super().handle(request)
        except CommandError:
            return StatusPacket(self.device_id, error_flags=ERR_INSTRUCTION)
