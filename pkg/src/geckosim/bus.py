"""Half-duplex bus: a device registry answering one transaction at a time."""

from __future__ import annotations

from typing import Dict, Optional

from .protocol import (
    BROADCAST_ID,
    ERR_ADDRESS,
    ERR_INSTRUCTION,
    MAX_DEVICE_ID,
    Instruction,
    Packet,
    StatusPacket,
    decode_packet,
    decode_status,
    encode_packet,
    encode_status,
)
from .registers import RW, AddressError, RegisterFile


class BusTimeout(Exception):
    """No device answered the request."""


class BusDevice:
    """A device that answers PING/READ/WRITE against its register file."""

    def __init__(self, device_id: int, regfile: RegisterFile):
        self.device_id = device_id
        self.regs = regfile

    def handle(self, request: Packet) -> StatusPacket:
        try:
            if request.instruction == Instruction.PING:
                return StatusPacket(self.device_id)
            if request.instruction == Instruction.READ:
                addr, count = request.params[0], request.params[1]
                return StatusPacket(self.device_id, params=self.regs.read(addr, count))
            if request.instruction == Instruction.WRITE:
                addr, payload = request.params[0], request.params[1:]
                self.regs.write(addr, payload, external=True)
                return StatusPacket(self.device_id)
        except AddressError:
            return StatusPacket(self.device_id, error_flags=ERR_ADDRESS)
        return StatusPacket(self.device_id, error_flags=ERR_INSTRUCTION)


class StubServo(BusDevice):
    """Inert joint servo: stores writes, returns reads, does nothing else."""

    def __init__(self, device_id: int, size: int = 64):
        super().__init__(device_id, RegisterFile(size, default_mode=RW))


class Bus:
    """Byte-level transaction fabric shared by the gripper and joint servos."""

    def __init__(self):
        self._devices: Dict[int, BusDevice] = {}

    def attach(self, device: BusDevice) -> None:
        if not 0 <= device.device_id <= MAX_DEVICE_ID:
            raise ValueError(f"device id {device.device_id:#04x} not assignable")
        if device.device_id in self._devices:
            raise ValueError(f"device id {device.device_id:#04x} already on bus")
        self._devices[device.device_id] = device

    @property
    def devices(self) -> Dict[int, "BusDevice"]:
        return dict(self._devices)

    def transact(self, request: Packet) -> Optional[StatusPacket]:
        """Run one request/response exchange through the wire encoding.

        Returns None for broadcast (no response expected). Raises BusTimeout
        when no device owns the unicast id.
        """
        wire = encode_packet(request)
        decoded, consumed = decode_packet(wire)
        assert consumed == len(wire)
        if decoded.device_id == BROADCAST_ID:
            for dev in self._devices.values():
                dev.handle(decoded)
            return None
        dev = self._devices.get(decoded.device_id)
        if dev is None:
            raise BusTimeout(f"no device at id {decoded.device_id:#04x}")
        status = dev.handle(decoded)
        # Response crosses the same wire; keep both directions byte-exact.
        reply, _ = decode_status(encode_status(status))
        return reply
