"""Log record format against an independently coded CRC and layout."""

import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geckosim.records import (
    RECORD_SIZE,
    ExperimentRecord,
    RecordError,
    crc16_ccitt,
    split_records,
)


def crc16_bitwise(data: bytes) -> int:
    # Straight from the polynomial definition, one bit at a time.
    crc = 0xFFFF
    for byte in data:
        crc ^= byte << 8
        for _ in range(8):
            if crc & 0x8000:
                crc = ((crc << 1) ^ 0x1021) & 0xFFFF
            else:
                crc = (crc << 1) & 0xFFFF
    return crc


def test_crc_check_value():
    # The classic check string for CRC-16/CCITT-FALSE.
    assert crc16_ccitt(b"123456789") == 0x29B1
    assert crc16_bitwise(b"123456789") == 0x29B1


def test_crc_empty():
    assert crc16_ccitt(b"") == 0xFFFF


@given(st.binary(max_size=64))
@settings(max_examples=300, deadline=None)
def test_crc_matches_bitwise_reference(data):
    assert crc16_ccitt(data) == crc16_bitwise(data)


def make_record(seq=0, **kw):
    fields = dict(
        seq=seq,
        timestamp_ms=123450,
        experiment_id=7,
        tof_mm=42,
        tof_valid=True,
        servo_current_mA=(30, 30, 150, 90),
        servo_command=(1000, 1000, 0, 500),
        status=0x0007,
        grasp_delay_ms=250,
    )
    fields.update(kw)
    return ExperimentRecord(**fields)


def test_record_is_35_bytes():
    assert len(make_record().encode()) == RECORD_SIZE == 35


def test_layout_little_endian():
    raw = make_record(seq=0x01020304, timestamp_ms=0x0A0B0C0D).encode()
    assert raw[0:4] == bytes([0x04, 0x03, 0x02, 0x01])
    assert raw[4:8] == bytes([0x0D, 0x0C, 0x0B, 0x0A])
    # trailing u16 is the crc over the first 33 bytes
    (stored,) = struct.unpack("<H", raw[33:35])
    assert stored == crc16_bitwise(raw[:33])


def test_roundtrip():
    rec = make_record(seq=9, tof_valid=False)
    assert ExperimentRecord.decode(rec.encode()) == rec


def test_corrupt_crc_rejected():
    raw = bytearray(make_record().encode())
    raw[34] ^= 0x01
    with pytest.raises(RecordError):
        ExperimentRecord.decode(bytes(raw))


def test_corrupt_body_rejected():
    raw = bytearray(make_record().encode())
    raw[10] ^= 0x80
    with pytest.raises(RecordError):
        ExperimentRecord.decode(bytes(raw))


def test_wrong_size_rejected():
    with pytest.raises(RecordError):
        ExperimentRecord.decode(bytes(34))


def test_split_records():
    chunks = [make_record(seq=i).encode() for i in range(4)]
    out = split_records(b"".join(chunks))
    assert out == chunks


def test_split_rejects_partial_tail():
    raw = make_record().encode() + b"\x00"
    with pytest.raises(RecordError):
        split_records(raw)


@given(
    seq=st.integers(0, 2**32 - 1),
    ts=st.integers(0, 2**32 - 1),
    exp=st.integers(0, 2**16 - 1),
    tof=st.integers(0, 2**16 - 1),
    valid=st.booleans(),
    currents=st.tuples(*[st.integers(0, 2**16 - 1)] * 4),
    commands=st.tuples(*[st.integers(0, 2**16 - 1)] * 4),
    status=st.integers(0, 2**16 - 1),
    delay=st.integers(0, 2**16 - 1),
)
@settings(max_examples=200, deadline=None)
def test_roundtrip_any_field_values(seq, ts, exp, tof, valid, currents, commands, status, delay):
    rec = ExperimentRecord(seq, ts, exp, tof, valid, currents, commands, status, delay)
    back = ExperimentRecord.decode(rec.encode())
    assert back == rec


def test_as_dict_keys():
    d = make_record().as_dict()
    assert d["seq"] == 0
    assert d["status"] == 7
    assert d["servo_current_mA"] == [30, 30, 150, 90]
