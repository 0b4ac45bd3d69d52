"""Independent gripper-behavior model used only by the conformance suite.

Written directly from the documented command semantics as a dict-state
interpreter, deliberately structured nothing like the firmware class, so a
shared misreading is unlikely to hide in both.

Timing rules restated:
  - CLOSE: engage both pairs now; wrist lock begins grasp_delay ms later
    and the locked bit sets another 500 ms after that (ramp end).
  - OPEN: disengage now, auto off; wrist unlock begins grasp_delay ms
    later; the locked bit clears the moment unlocking starts.
  - LOCK/UNLOCK: act immediately (LOCK still takes the 500 ms ramp), and
    cancel any pending delayed wrist action.
  - Only one delayed wrist action exists; the newest scheduler wins.
  - Timers are evaluated on tick boundaries.
  - Auto: arm on the first valid range under 40 mm; every later valid
    sample re-estimates time to contact from the arming sample; fire at
    estimate plus grasp delay, running the CLOSE sequence. Invalid or
    out-of-band samples never cancel a made schedule. Arming requires
    disengaged pairs. OPEN and DISABLE AUTO clear the schedule.
"""


def initial_state(grasp_delay_ms=250):
    return {
        "t": 0,
        "engaged": False,
        "locked": False,
        "auto": False,
        "exp": 0,
        "delay": grasp_delay_ms,
        "wrist_timer": None,     # ("lock"|"unlock", due_ms)
        "ramp_end": None,        # lock ramp completion time
        "anchor": None,          # (distance_mm, t_ms)
        "fire_at": None,
    }


def status_word(s):
    bits = 0
    if s["engaged"]:
        bits |= 0b11
    if s["locked"]:
        bits |= 0b100
    if s["auto"]:
        bits |= 0b1000
    if s["exp"] != 0:
        bits |= 0b10000
    return bits


def _begin_lock(s):
    if not s["locked"] and s["ramp_end"] is None:
        s["ramp_end"] = s["t"] + 500


def _begin_unlock(s):
    s["locked"] = False
    s["ramp_end"] = None


def _close_sequence(s):
    s["engaged"] = True
    s["wrist_timer"] = ("lock", s["t"] + s["delay"])


def apply_command(s, name, param=0):
    if name == "OPEN":
        s["engaged"] = False
        s["auto"] = False
        s["anchor"] = None
        s["fire_at"] = None
        s["wrist_timer"] = ("unlock", s["t"] + s["delay"])
    elif name == "CLOSE":
        _close_sequence(s)
    elif name == "TOGGLE AUTO":
        s["auto"] = not s["auto"]
        if not s["auto"]:
            s["anchor"] = None
            s["fire_at"] = None
    elif name == "MARK":
        s["exp"] = param if param != 0 else 0
    elif name == "ENGAGE":
        s["engaged"] = True
    elif name == "DISENGAGE":
        s["engaged"] = False
    elif name == "LOCK":
        s["wrist_timer"] = None
        _begin_lock(s)
    elif name == "UNLOCK":
        s["wrist_timer"] = None
        _begin_unlock(s)
    elif name == "ENABLE AUTO":
        s["auto"] = True
    elif name == "DISABLE AUTO":
        s["auto"] = False
        s["anchor"] = None
        s["fire_at"] = None
    elif name == "SET DELAY":
        s["delay"] = param
    elif name in ("OPEN EXP", "CLOSE EXP", "NEXT RECORD"):
        pass  # log reading; no control-state effect
    else:
        raise ValueError(name)


def tick(s, now_ms, sample=None):
    """sample: None or (distance_mm, valid)."""
    s["t"] = now_ms
    timer = s["wrist_timer"]
    if timer is not None and now_ms >= timer[1]:
        s["wrist_timer"] = None
        if timer[0] == "lock":
            _begin_lock(s)
        else:
            _begin_unlock(s)
    if s["ramp_end"] is not None and now_ms >= s["ramp_end"]:
        s["locked"] = True
        s["ramp_end"] = None
    _auto(s, now_ms, sample)


def _auto(s, now_ms, sample):
    if not s["auto"]:
        return
    if s["fire_at"] is not None and now_ms >= s["fire_at"]:
        _close_sequence(s)
        s["anchor"] = None
        s["fire_at"] = None
        return
    if s["engaged"]:
        return
    if sample is None or not sample[1]:
        return
    d = sample[0]
    if d >= 40.0:
        s["anchor"] = None
        return
    if s["anchor"] is None:
        s["anchor"] = (d, now_ms)
        return
    d0, t0 = s["anchor"]
    if now_ms <= t0:
        return
    speed = (d0 - d) / ((now_ms - t0) / 1000.0)
    if speed > 0.0:
        ttc_ms = int(round(d / speed * 1000.0))
        s["fire_at"] = now_ms + ttc_ms + s["delay"]
