"""Directional dry-adhesive mechanics for the two tile pairs.

Forces are newtons, distances millimeters. Each pair loads its tiles in
opposed shear through a tendon, so normal capacity follows from the shear
preload through a fixed coupling ratio, clamped to a per-pair ceiling.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

MU_NORMAL_PER_SHEAR = 2.0
CAPACITY_CEILING_N = 20.0
NOMINAL_SHEAR_PRELOAD_N = 10.0

MAX_ENGAGE_GAP_MM = 1.0
MAX_ENGAGE_SPEED_MM_S = 200.0
MAX_ENGAGE_MISALIGN_DEG = 10.0

MAX_RELEASE_IMPULSE_NS = 0.01
DEFAULT_RELEASE_IMPULSE_NS = 0.005

WEAR_CYCLE_LIMIT = 30000
PULL_NOISE_FRACTION = 0.08

# Ground calibration of the flight tiles; one pair at nominal preload.
FLIGHT_QUALITY = 0.27


class EngageResult(Enum):
    SUCCESS = "success"
    NO_CONTACT = "no-contact"
    EXCESS_SPEED = "excess-speed"
    EXCESS_MISALIGNMENT = "excess-misalignment"


@dataclass(frozen=True)
class ContactConditions:
    gap_mm: float
    approach_speed_mm_s: float
    misalignment_deg: float
    shear_preload_n: float = NOMINAL_SHEAR_PRELOAD_N


@dataclass
class TilePair:
    quality: float = 1.0
    cycles: int = 0
    engaged: bool = False
    shear_preload_n: float = 0.0
    load_share_n: float = 0.0

    @property
    def worn(self) -> bool:
        return self.cycles > WEAR_CYCLE_LIMIT


def attempt_engage(pair: TilePair, cond: ContactConditions) -> EngageResult:
    """Try to set the pair; checks run in fixed order, failures count a cycle."""
    if pair.engaged:
        return EngageResult.SUCCESS
    pair.cycles += 1
    if cond.gap_mm > MAX_ENGAGE_GAP_MM:
        return EngageResult.NO_CONTACT
    if abs(cond.approach_speed_mm_s) > MAX_ENGAGE_SPEED_MM_S:
        return EngageResult.EXCESS_SPEED
    if abs(cond.misalignment_deg) > MAX_ENGAGE_MISALIGN_DEG:
        return EngageResult.EXCESS_MISALIGNMENT
    pair.engaged = True
    pair.shear_preload_n = cond.shear_preload_n
    pair.load_share_n = 0.0
    return EngageResult.SUCCESS


def normal_capacity(pair: TilePair) -> float:
    """Holdable normal force for one pair; zero when not engaged."""
    if not pair.engaged:
        return 0.0
    ideal = min(CAPACITY_CEILING_N, MU_NORMAL_PER_SHEAR * pair.shear_preload_n)
    return ideal * pair.quality


@dataclass(frozen=True)
class LoadResult:
    shares_n: Tuple[float, ...]
    detached: Tuple[bool, ...]

    @property
    def any_detached(self) -> bool:
        return any(self.detached)


def apply_normal_load(pairs: Sequence[TilePair], load_n: float) -> LoadResult:
    """Split a pull evenly over engaged pairs; no redistribution on failure.

    A pair whose share exceeds its capacity detaches in place. The load is
    not re-shared within the same call, so simultaneous overload drops all
    of them rather than cascading one by one.
    """
    engaged = [p for p in pairs if p.engaged]
    shares = []
    detached = []
    share = load_n / len(engaged) if engaged else 0.0
    for p in pairs:
        if not p.engaged:
            shares.append(0.0)
            detached.append(False)
            continue
        shares.append(share)
        if share > normal_capacity(p):
            p.engaged = False
            p.load_share_n = 0.0
            detached.append(True)
        else:
            p.load_share_n = share
            detached.append(False)
    return LoadResult(tuple(shares), tuple(detached))


@dataclass(frozen=True)
class ReleaseResult:
    released: bool
    impulse_ns: float
    forcible: bool


def release(pair: TilePair, impulse_ns: float = DEFAULT_RELEASE_IMPULSE_NS) -> ReleaseResult:
    """Peel the pair off; flags a forcible release if it was carrying load."""
    if impulse_ns > MAX_RELEASE_IMPULSE_NS:
        raise ValueError(f"release impulse {impulse_ns} N*s above {MAX_RELEASE_IMPULSE_NS}")
    if not pair.engaged:
        return ReleaseResult(False, 0.0, False)
    forcible = pair.load_share_n > 0.0
    pair.engaged = False
    pair.shear_preload_n = 0.0
    pair.load_share_n = 0.0
    return ReleaseResult(True, impulse_ns, forcible)


def gripper_capacity(pairs: Sequence[TilePair]) -> float:
    return sum(normal_capacity(p) for p in pairs)


@dataclass(frozen=True)
class PullTestSample:
    cycle: int
    measured_n: float
    true_n: float
    wear_warning: bool


def flight_pairs() -> List[TilePair]:
    return [TilePair(quality=FLIGHT_QUALITY), TilePair(quality=FLIGHT_QUALITY)]


def nominal_conditions() -> ContactConditions:
    return ContactConditions(gap_mm=0.2, approach_speed_mm_s=30.0, misalignment_deg=0.0)


def pull_test(
    pairs: Sequence[TilePair],
    rng: random.Random,
    cycles: int = 1,
    conditions: Optional[ContactConditions] = None,
) -> List[PullTestSample]:
    """Bench rig: engage, pull to measured failure, release, repeat.

    The load cell is the noisy element; measurement error is multiplicative
    uniform within +/-8 percent of the true combined capacity.
    """
    cond = conditions or nominal_conditions()
    samples = []
    for i in range(cycles):
        for p in pairs:
            attempt_engage(p, cond)
        true_n = gripper_capacity(pairs)
        measured = true_n * (1.0 + rng.uniform(-PULL_NOISE_FRACTION, PULL_NOISE_FRACTION))
        warning = any(p.worn for p in pairs)
        samples.append(PullTestSample(i, measured, true_n, warning))
        for p in pairs:
            release(p)
    return samples
