"""Addressable byte map backing a bus device, with access modes and write hooks."""

from __future__ import annotations

from typing import Callable, Optional

RO = "ro"
RW = "rw"


class AddressError(Exception):
    """Access would cross the register file bounds or violate access mode."""


class RegisterFile:
    """Contiguous byte array with per-address access mode.

    Out-of-range or mode-violating accesses raise AddressError before any
    byte is touched (no partial reads/writes). ``write_hook`` fires after a
    successful external write with (start_address, payload).
    """

    def __init__(self, size: int, default_mode: str = RW):
        self.size = size
        self._data = bytearray(size)
        self._mode = [default_mode] * size
        self.write_hook: Optional[Callable[[int, bytes], None]] = None

    def set_mode(self, start: int, length: int, mode: str) -> None:
        for a in range(start, start + length):
            self._mode[a] = mode

    def _check_span(self, start: int, length: int) -> None:
        if length < 0 or start < 0 or start + length > self.size:
            raise AddressError(f"span {start:#04x}+{length} outside {self.size}-byte file")

    def read(self, start: int, length: int) -> bytes:
        self._check_span(start, length)
        return bytes(self._data[start:start + length])

    def write(self, start: int, payload, external: bool = False) -> None:
        payload = bytes(payload)
        if not payload:
            raise AddressError("zero-length write")
        self._check_span(start, len(payload))
        if external:
            for a in range(start, start + len(payload)):
                if self._mode[a] != RW:
                    raise AddressError(f"address {a:#04x} is read-only")
        self._data[start:start + len(payload)] = payload
        if external and self.write_hook is not None:
            self.write_hook(start, payload)

    def poke(self, start: int, payload) -> None:
        """Device-internal write; ignores access modes, fires no hook."""
        self.write(start, payload, external=False)

    def poke_u16(self, start: int, value: int) -> None:
        self.poke(start, bytes([value & 0xFF, (value >> 8) & 0xFF]))

    def read_u16(self, start: int) -> int:
        lo, hi = self.read(start, 2)
        return lo | (hi << 8)
