import pytest

from geckosim.registers import RO, RW, AddressError, RegisterFile


@pytest.fixture
def regs():
    return RegisterFile(0x80, default_mode=RO)


def test_starts_zeroed(regs):
    assert regs.read(0, 0x80) == bytes(0x80)


def test_poke_and_read(regs):
    regs.poke(0x30, b"\x07\x00")
    assert regs.read(0x30, 2) == b"\x07\x00"


def test_u16_helpers_little_endian(regs):
    regs.poke_u16(0x30, 0x0107)
    assert regs.read(0x30, 2) == b"\x07\x01"
    assert regs.read_u16(0x30) == 0x0107


def test_read_past_end_raises(regs):
    with pytest.raises(AddressError):
        regs.read(0x7F, 2)
    with pytest.raises(AddressError):
        regs.read(0x80, 1)


def test_external_write_to_readonly_raises(regs):
    with pytest.raises(AddressError):
        regs.write(0x30, b"\x01", external=True)


def test_external_write_to_rw_window(regs):
    regs.set_mode(0x40, 3, RW)
    regs.write(0x40, b"\x02\x00\x00", external=True)
    assert regs.read(0x40, 3) == b"\x02\x00\x00"


def test_external_write_straddling_modes_rejected_whole(regs):
    regs.set_mode(0x40, 3, RW)
    with pytest.raises(AddressError):
        regs.write(0x42, b"\x00\x00", external=True)  # 0x43 is RO
    # nothing was written
    assert regs.read(0x42, 1) == b"\x00"


def test_internal_poke_ignores_modes(regs):
    regs.poke(0x00, b"\xAA")
    assert regs.read(0x00, 1) == b"\xAA"


def test_write_hook_fires_on_external_write_only(regs):
    seen = []
    regs.set_mode(0x40, 3, RW)
    regs.write_hook = lambda start, payload: seen.append((start, bytes(payload)))
    regs.write(0x40, b"\x05\x00\x00", external=True)
    regs.poke(0x40, b"\x00")
    assert seen == [(0x40, b"\x05\x00\x00")]


def test_zero_length_write_rejected(regs):
    with pytest.raises(AddressError):
        regs.write(0x40, b"", external=True)
