"""Random command/tick sequences against the independent reference model.

Both models consume the same stimulus stream; after every step the status
word must match bit for bit. The stimulus generator leans on short bursts
of ticks so delayed wrist actions and auto schedules actually mature.
"""

import random

import pytest

import reference_model as ref
from geckosim import firmware as fw
from geckosim.firmware import GripperFirmware, TofSample

TICK = 50

ACTION_COMMANDS = [
    ("OPEN", fw.CMD_OPEN, None),
    ("CLOSE", fw.CMD_CLOSE, None),
    ("TOGGLE AUTO", fw.CMD_TOGGLE_AUTO, None),
    ("MARK", fw.CMD_MARK, "exp"),
    ("ENGAGE", fw.CMD_ENGAGE, None),
    ("DISENGAGE", fw.CMD_DISENGAGE, None),
    ("LOCK", fw.CMD_LOCK, None),
    ("UNLOCK", fw.CMD_UNLOCK, None),
    ("ENABLE AUTO", fw.CMD_ENABLE_AUTO, None),
    ("DISABLE AUTO", fw.CMD_DISABLE_AUTO, None),
    ("SET DELAY", fw.CMD_SET_DELAY, "delay"),
    ("OPEN EXP", fw.CMD_OPEN_EXP, "exp"),
    ("CLOSE EXP", fw.CMD_CLOSE_EXP, None),
    ("NEXT RECORD", fw.CMD_NEXT_RECORD, "count"),
]


def make_stimulus(rng, steps):
    """Yield ("cmd", name, code, param) and ("tick", n_ticks, sample_kind)."""
    seq = []
    for _ in range(steps):
        if rng.random() < 0.45:
            name, code, kind = rng.choice(ACTION_COMMANDS)
            if kind == "exp":
                param = rng.choice([0, 1, 2, 3])
            elif kind == "delay":
                param = rng.choice([0, 50, 100, 250, 400])
            elif kind == "count":
                param = rng.randrange(0, 5)
            else:
                param = 0
            seq.append(("cmd", name, code, param))
        else:
            n = rng.choice([1, 1, 2, 3, 6, 12, 18])
            kind = rng.choice(["none", "far", "near", "closing", "invalid"])
            seq.append(("tick", n, kind))
    return seq


def make_sample(rng, kind, t, closing_state):
    if kind == "none":
        return None
    if kind == "invalid":
        return (3.0, False)
    if kind == "far":
        return (float(rng.randrange(41, 100)), True)
    if kind == "near":
        return (float(rng.randrange(6, 39)), True)
    # closing: a consistent inward march so schedules form
    d = closing_state["d"]
    closing_state["d"] = max(6.0, d - rng.choice([1.0, 2.0, 3.0]))
    return (d, True)


@pytest.mark.parametrize("master_seed", [0xA5A5, 0x1CEB00DA])
def test_status_conformance_random_sequences(master_seed):
    rng = random.Random(master_seed)
    n_sequences = 150
    for i in range(n_sequences):
        grip = GripperFirmware()
        model = ref.initial_state()
        t = 0
        closing = {"d": 38.0}
        stimulus = make_stimulus(rng, steps=40)
        for step_no, step in enumerate(stimulus):
            if step[0] == "cmd":
                _, name, code, param = step
                grip.execute_command(code, param)
                ref.apply_command(model, name, param)
            else:
                _, n, kind = step
                for _ in range(n):
                    t += TICK
                    raw = make_sample(rng, kind, t, closing)
                    sample = None
                    if raw is not None:
                        sample = TofSample(raw[0], raw[1], t)
                    grip.tick(t, sample)
                    ref.tick(model, t, raw)
            assert grip.status_register() == ref.status_word(model), (
                f"seq {i} step {step_no} ({step}): "
                f"fw={grip.status_register():#06x} ref={ref.status_word(model):#06x}"
            )


def test_conformance_focused_wrist_races():
    # Command immediately before/after the tick that matures a timer.
    for offset_cmds in range(3):
        grip = GripperFirmware()
        model = ref.initial_state()
        grip.execute_command(fw.CMD_CLOSE)
        ref.apply_command(model, "CLOSE")
        t = 0
        for k in range(30):
            t += TICK
            grip.tick(t)
            ref.tick(model, t)
            if k == offset_cmds * 2:
                grip.execute_command(fw.CMD_OPEN)
                ref.apply_command(model, "OPEN")
            assert grip.status_register() == ref.status_word(model)


def test_conformance_auto_full_approach():
    grip = GripperFirmware()
    model = ref.initial_state()
    grip.execute_command(fw.CMD_ENABLE_AUTO)
    ref.apply_command(model, "ENABLE AUTO")
    t = 0
    d = 90.0
    for _ in range(200):
        t += TICK
        d -= 1.5
        raw = (d, True) if d >= 5.0 else (max(d, 0.0), False)
        grip.tick(t, TofSample(raw[0], raw[1], t))
        ref.tick(model, t, raw)
        assert grip.status_register() == ref.status_word(model)
    assert grip.pair_engaged == [True, True]
    assert grip.wrist_locked
