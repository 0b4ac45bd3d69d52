"""Half-duplex servo bus wire format: framing, checksumming, stream decoding.

Frame layout (request and status alike)::

    0xFF 0xFF <id> <len> <instr/err> <params...> <checksum>

where ``len`` counts the instruction/error byte, the params, and the
checksum (i.e. ``len = n_params + 2``), and the checksum is the bitwise
complement of the low byte of the sum over id, len, instr and params.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

SYNC = 0xFF
BROADCAST_ID = 0xFE
MAX_DEVICE_ID = 0xFD
MAX_PARAMS = 250

# Error bits carried in the status frame's error byte.
ERR_INSTRUCTION = 0x01
ERR_CHECKSUM = 0x02
ERR_ADDRESS = 0x04


class Instruction(IntEnum):
    PING = 0x01
    READ = 0x02
    WRITE = 0x03


# Required frame length byte per instruction; None means "variable, >= min".
_ARITY = {
    Instruction.PING: (2, 2),
    Instruction.READ: (4, 4),
    Instruction.WRITE: (4, MAX_PARAMS + 2),  # addr + at least one data byte
}


class ProtocolError(Exception):
    """Base class for wire-format violations."""


class EncodeError(ProtocolError):
    pass


class ChecksumError(ProtocolError):
    """A full frame arrived but its checksum byte does not validate."""

    def __init__(self, consumed: int):
        super().__init__(f"checksum mismatch ({consumed} bytes consumed)")
        self.consumed = consumed


class NeedMoreBytes(ProtocolError):
    """The buffer ends mid-frame; feed more bytes and retry."""


@dataclass(frozen=True)
class Packet:
    """One request frame on the bus."""

    device_id: int
    instruction: Instruction
    params: bytes = b""

    def __post_init__(self):
        if not 0 <= self.device_id <= BROADCAST_ID:
            raise EncodeError(f"device id {self.device_id} out of range")
        object.__setattr__(self, "params", bytes(self.params))


@dataclass(frozen=True)
class StatusPacket:
    """One response frame; ``error_flags`` uses the ERR_* bits."""

    device_id: int
    error_flags: int = 0
    params: bytes = b""

    def __post_init__(self):
        object.__setattr__(self, "params", bytes(self.params))

    @property
    def ok(self) -> bool:
        return self.error_flags == 0


def compute_checksum(body) -> int:
    """Complement of the low byte of the sum over id..last param byte."""
    return ~sum(body) & 0xFF


def encode_packet(p: Packet) -> bytes:
    if len(p.params) > MAX_PARAMS:
        raise EncodeError(f"params too long ({len(p.params)} > {MAX_PARAMS})")
    length = len(p.params) + 2
    lo, hi = _ARITY[Instruction(p.instruction)]
    if not lo <= length <= hi:
        raise EncodeError(f"{Instruction(p.instruction).name} cannot carry "
                          f"{len(p.params)} params")
    body = bytes([p.device_id, length, int(p.instruction)]) + p.params
    return bytes([SYNC, SYNC]) + body + bytes([compute_checksum(body)])


def encode_status(s: StatusPacket) -> bytes:
    if len(s.params) > MAX_PARAMS:
        raise EncodeError(f"params too long ({len(s.params)} > {MAX_PARAMS})")
    length = len(s.params) + 2
    body = bytes([s.device_id, length, s.error_flags & 0xFF]) + s.params
    return bytes([SYNC, SYNC]) + body + bytes([compute_checksum(body)])


def _find_sync(buf, start: int) -> int:
    """Index of the next 0xFF 0xFF pair at or after start, or -1."""
    i = start
    while True:
        i = buf.find(SYNC, i)
        if i < 0 or i + 1 >= len(buf):
            return -1
        if buf[i + 1] == SYNC:
            return i
        i += 1


def decode_packet(stream) -> tuple[Packet, int]:
    """Scan ``stream`` for the first well-formed request frame.

    Returns (packet, consumed_bytes). Bytes before the frame (garbage,
    failed syncs) count as consumed. Raises ChecksumError when a complete
    frame fails validation (the frame is consumed) and NeedMoreBytes when
    the buffer ends before a frame completes.
    """
    return _decode(bytes(stream), status=False)


def decode_status(stream) -> tuple[StatusPacket, int]:
    """Same scan as decode_packet but for response frames."""
    return _decode(bytes(stream), status=True)


def _decode(buf: bytes, status: bool):
    pos = 0
    while True:
        start = _find_sync(buf, pos)
        if start < 0:
            raise NeedMoreBytes("no sync in buffer")
        # Skip runs of 0xFF so <id> is never read from a sync byte.
        hdr = start + 2
        if hdr < len(buf) and buf[hdr] == SYNC:
            pos = start + 1
            continue
        if hdr + 2 > len(buf):
            raise NeedMoreBytes("header truncated")
        dev_id, length = buf[hdr], buf[hdr + 1]
        if dev_id > BROADCAST_ID or length < 2:
            pos = start + 2
            continue
        end = hdr + 2 + length  # one past the checksum byte
        if end > len(buf):
            raise NeedMoreBytes("frame truncated")
        instr = buf[hdr + 2]
        if not status:
            if instr not in (0x01, 0x02, 0x03):
                pos = start + 2
                continue
            lo, hi = _ARITY[Instruction(instr)]
            if not lo <= length <= hi:
                pos = start + 2
                continue
        body = buf[hdr:end - 1]
        if compute_checksum(body) != buf[end - 1]:
            raise ChecksumError(consumed=end)
        params = bytes(buf[hdr + 3:end - 1])
        if status:
            return StatusPacket(dev_id, instr, params), end
        return Packet(dev_id, Instruction(instr), params), end


def ping(device_id: int) -> Packet:
    return Packet(device_id, Instruction.PING)


def read_request(device_id: int, address: int, count: int) -> Packet:
    return Packet(device_id, Instruction.READ, bytes([address & 0xFF, count & 0xFF]))


def write_request(device_id: int, address: int, payload) -> Packet:
    return Packet(device_id, Instruction.WRITE, bytes([address & 0xFF]) + bytes(payload))
