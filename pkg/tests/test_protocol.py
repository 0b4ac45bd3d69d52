"""Wire format: frozen byte vectors first, then generated round trips."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geckosim.protocol import (
    BROADCAST_ID,
    ChecksumError,
    EncodeError,
    Instruction,
    NeedMoreBytes,
    Packet,
    ProtocolError,
    StatusPacket,
    compute_checksum,
    decode_packet,
    decode_status,
    encode_packet,
    encode_status,
    ping,
    read_request,
    write_request,
)

# Checksum vectors worked out by hand: ~(sum) & 0xFF.
CHECKSUM_VECTORS = [
    (bytes([0x01, 0x02, 0x01]), 0xFB),
    (bytes([0x00]), 0xFF),
    (bytes([0xFF, 0x01]), 0xFF),
    (bytes([0x20, 0x04, 0x03, 0x30, 0x02]), 0xA6),
]


@pytest.mark.parametrize("body,expected", CHECKSUM_VECTORS)
def test_checksum_vectors(body, expected):
    assert compute_checksum(body) == expected


def test_ping_frame_bytes():
    # Full frame spelled out once so codec changes cannot hide.
    assert encode_packet(ping(0x01)) == bytes([0xFF, 0xFF, 0x01, 0x02, 0x01, 0xFB])


def test_read_request_frame():
    frame = encode_packet(read_request(0x20, 0x30, 2))
    assert frame == bytes([0xFF, 0xFF, 0x20, 0x04, 0x02, 0x30, 0x02, 0xA7])


def test_write_request_frame():
    frame = encode_packet(write_request(0x20, 0x40, b"\x02\x00\x00"))
    assert frame[:5] == bytes([0xFF, 0xFF, 0x20, 0x06, 0x03])
    assert frame[5:9] == bytes([0x40, 0x02, 0x00, 0x00])
    assert frame[9] == compute_checksum(frame[2:9])


def test_status_frame_roundtrip():
    status = StatusPacket(0x20, 0x00, bytes([0x07, 0x00]))
    frame = encode_status(status)
    decoded, used = decode_status(frame)
    assert used == len(frame)
    assert decoded == status
    assert decoded.ok


def test_decode_needs_more_bytes():
    frame = encode_packet(ping(1))
    for cut in range(1, len(frame)):
        with pytest.raises(NeedMoreBytes):
            decode_packet(frame[:cut])


def test_decode_skips_leading_garbage():
    frame = encode_packet(ping(5))
    noisy = b"\x12\x34\x00" + frame
    packet, used = decode_packet(noisy)
    assert packet.device_id == 5
    assert used == len(noisy)


def test_decode_resyncs_after_bad_checksum():
    good = encode_packet(ping(2))
    bad = bytearray(good)
    bad[-1] ^= 0xFF
    stream = bytes(bad) + good
    with pytest.raises(ChecksumError) as info:
        decode_packet(stream)
    consumed = info.value.consumed
    packet, used = decode_packet(stream[consumed:])
    assert packet.device_id == 2


def test_bad_checksum_raises():
    frame = bytearray(encode_packet(read_request(1, 0, 1)))
    frame[-1] ^= 0x01
    with pytest.raises(ChecksumError):
        decode_packet(bytes(frame))


def test_device_id_out_of_range_rejected():
    with pytest.raises(EncodeError):
        encode_packet(Packet(0xFF, Instruction.PING, b""))


def test_too_many_params_rejected():
    with pytest.raises(EncodeError):
        encode_packet(Packet(1, Instruction.WRITE, bytes(251)))


def test_wrong_arity_rejected():
    # PING carries no parameters; a frame claiming otherwise is invalid.
    body = bytes([0x01, 0x03, 0x01, 0x55])
    frame = bytes([0xFF, 0xFF]) + body + bytes([compute_checksum(body)])
    with pytest.raises(ProtocolError):
        decode_packet(frame)


@given(
    device_id=st.integers(0, 0xFE),
    instruction=st.sampled_from([Instruction.PING, Instruction.READ, Instruction.WRITE]),
    data=st.binary(max_size=32),
)
@settings(max_examples=300, deadline=None)
def test_request_roundtrip(device_id, instruction, data):
    if instruction == Instruction.PING:
        params = b""
    elif instruction == Instruction.READ:
        params = (data + b"\x00\x01")[:2]
    else:
        params = b"\x00" + (data or b"\x01")  # write wants data after the address
    packet = Packet(device_id, instruction, params)
    decoded, used = decode_packet(encode_packet(packet))
    assert decoded == packet
    assert used == len(encode_packet(packet))


@given(
    device_id=st.integers(0, 0xFD),
    flags=st.integers(0, 0xFF),
    params=st.binary(max_size=64),
)
@settings(max_examples=300, deadline=None)
def test_status_roundtrip(device_id, flags, params):
    status = StatusPacket(device_id, flags, params)
    decoded, _ = decode_status(encode_status(status))
    assert decoded == status


def test_corruption_rejected_or_differs():
    # Single byte flips must never decode back to the original packet.
    rng = random.Random(0x5EED)
    packet = read_request(0x20, 0x50, 35)
    frame = bytearray(encode_packet(packet))
    for _ in range(2000):
        pos = rng.randrange(len(frame))
        bit = 1 << rng.randrange(8)
        mutated = bytearray(frame)
        mutated[pos] ^= bit
        try:
            decoded, _ = decode_packet(bytes(mutated))
        except ProtocolError:
            continue
        assert decoded != packet


def test_stream_of_packets_decodes_in_sequence():
    rng = random.Random(1234)
    packets = [ping(rng.randrange(0xFE)) for _ in range(50)]
    stream = b"".join(encode_packet(p) for p in packets)
    out = []
    view = stream
    while view:
        packet, used = decode_packet(view)
        out.append(packet)
        view = view[used:]
    assert out == packets


def test_broadcast_id_encodes():
    frame = encode_packet(ping(BROADCAST_ID))
    assert frame[2] == 0xFE
