import pytest

from geckosim.bus import Bus, BusTimeout, StubServo
from geckosim.protocol import (
    BROADCAST_ID,
    ERR_ADDRESS,
    ERR_INSTRUCTION,
    Instruction,
    Packet,
    ping,
    read_request,
    write_request,
)


@pytest.fixture
def bus():
    b = Bus()
    b.attach(StubServo(0x01))
    b.attach(StubServo(0x02))
    return b


def test_ping_acks(bus):
    resp = bus.transact(ping(0x01))
    assert resp.ok
    assert resp.device_id == 0x01
    assert resp.params == b""


def test_write_then_read_roundtrip(bus):
    assert bus.transact(write_request(0x02, 0x10, b"\xAB\xCD")).ok
    resp = bus.transact(read_request(0x02, 0x10, 2))
    assert resp.params == b"\xAB\xCD"


def test_unknown_id_times_out(bus):
    with pytest.raises(BusTimeout):
        bus.transact(ping(0x55))


def test_broadcast_reaches_all_no_response(bus):
    assert bus.transact(write_request(BROADCAST_ID, 0x00, b"\x11")) is None
    assert bus.transact(read_request(0x01, 0x00, 1)).params == b"\x11"
    assert bus.transact(read_request(0x02, 0x00, 1)).params == b"\x11"


def test_read_past_end_sets_address_flag(bus):
    resp = bus.transact(read_request(0x01, 0x3F, 2))
    assert not resp.ok
    assert resp.error_flags & ERR_ADDRESS


def test_unsupported_instruction_flagged(bus):
    resp = bus.transact(Packet(0x01, Instruction.PING, b""))
    assert resp.ok
    # hand-build an unsupported instruction: reuse WRITE header, patch later
    servo = bus.devices[0x01]
    bogus = Packet(0x01, Instruction.READ, b"\x00\x01")
    object.__setattr__(bogus, "instruction", 0x07)
    assert servo.handle(bogus).error_flags & ERR_INSTRUCTION


def test_duplicate_id_rejected(bus):
    with pytest.raises(ValueError):
        bus.attach(StubServo(0x01))


def test_attach_broadcast_id_rejected(bus):
    with pytest.raises(ValueError):
        bus.attach(StubServo(BROADCAST_ID))
