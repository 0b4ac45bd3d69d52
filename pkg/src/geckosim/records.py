"""Fixed 35-byte experiment record stored on the simulated microSD card.

Little-endian layout::

    0   u32  seq
    4   u32  timestamp_ms
    8   u16  experiment_id
    10  u16  tof_mm
    12  u8   tof_valid
    13  4xu16 servo_current_mA   (load A, load B, release, wrist)
    21  4xu16 servo_command      (same order)
    29  u16  status
    31  u16  grasp_delay_ms
    33  u16  crc16 (CCITT, init 0xFFFF, over bytes 0..32)
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence, Tuple

RECORD_SIZE = 35
_BODY = struct.Struct("<IIHHB4H4HHH")
assert _BODY.size == 33

_CRC_TABLE = []
for _b in range(256):
    _c = _b << 8
    for _ in range(8):
        _c = ((_c << 1) ^ 0x1021) if (_c & 0x8000) else (_c << 1)
    _CRC_TABLE.append(_c & 0xFFFF)


def crc16_ccitt(data: bytes, crc: int = 0xFFFF) -> int:
    for byte in data:
        crc = ((crc << 8) & 0xFFFF) ^ _CRC_TABLE[((crc >> 8) ^ byte) & 0xFF]
    return crc


class RecordError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentRecord:
    seq: int
    timestamp_ms: int
    experiment_id: int
    tof_mm: int
    tof_valid: bool
    servo_current_mA: Tuple[int, int, int, int]
    servo_command: Tuple[int, int, int, int]
    status: int
    grasp_delay_ms: int

    def encode(self) -> bytes:
        body = _BODY.pack(
            self.seq,
            self.timestamp_ms,
            self.experiment_id,
            self.tof_mm,
            1 if self.tof_valid else 0,
            *self.servo_current_mA,
            *self.servo_command,
            self.status,
            self.grasp_delay_ms,
        )
        return body + struct.pack("<H", crc16_ccitt(body))

    @classmethod
    def decode(cls, raw: bytes) -> "ExperimentRecord":
        if len(raw) != RECORD_SIZE:
            raise RecordError(f"record must be {RECORD_SIZE} bytes, got {len(raw)}")
        (stored,) = struct.unpack_from("<H", raw, 33)
        if crc16_ccitt(raw[:33]) != stored:
            raise RecordError("crc16 mismatch")
        f = _BODY.unpack(raw[:33])
        return cls(
            seq=f[0],
            timestamp_ms=f[1],
            experiment_id=f[2],
            tof_mm=f[3],
            tof_valid=bool(f[4]),
            servo_current_mA=tuple(f[5:9]),
            servo_command=tuple(f[9:13]),
            status=f[13],
            grasp_delay_ms=f[14],
        )

    def as_dict(self) -> dict:
        return {
            "seq": self.seq,
            "timestamp_ms": self.timestamp_ms,
            "experiment_id": self.experiment_id,
            "tof_mm": self.tof_mm,
            "tof_valid": self.tof_valid,
            "servo_current_mA": list(self.servo_current_mA),
            "servo_command": list(self.servo_command),
            "status": self.status,
            "grasp_delay_ms": self.grasp_delay_ms,
        }


def split_records(raw: bytes) -> Sequence[bytes]:
    if len(raw) % RECORD_SIZE:
        raise RecordError(f"log length {len(raw)} is not a multiple of {RECORD_SIZE}")
    return [raw[i:i + RECORD_SIZE] for i in range(0, len(raw), RECORD_SIZE)]
