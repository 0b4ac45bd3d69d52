"""Planar free-flyer rigid body, PD station keeping, and the ranging sensor.

Axes: x is the approach direction with the perch surface as a plane of
constant x; y is lateral drift; theta is yaw away from the surface normal.
The integrator is semi-implicit Euler on plain floats. This loop runs every
tick inside Monte Carlo campaigns, so keep it allocation-free.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional, Tuple

FLYER_MASS_KG = 10.0
MAX_ACCEL = 0.1          # m/s^2, per axis actuation authority
MAX_ANG_ACCEL = 0.1      # rad/s^2

TOF_NOISE_MM = 1.0
TOF_VALID_MIN_MM = 5.0
TOF_VALID_MAX_MM = 100.0


@dataclass
class FlyerState:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0
    vx: float = 0.0
    vy: float = 0.0
    omega: float = 0.0
    pinned: bool = False

    def speed(self) -> float:
        return math.hypot(self.vx, self.vy)


@dataclass(frozen=True)
class PerchSurface:
    """Plane of constant x; the flyer approaches from x < position."""

    x_m: float = 0.0

    def gap_m(self, state: FlyerState) -> float:
        return self.x_m - state.x

    def gap_mm(self, state: FlyerState) -> float:
        return (self.x_m - state.x) * 1000.0


@dataclass(frozen=True)
class PdGains:
    kp: float = 0.5
    kd: float = 2.5
    kp_ang: float = 0.8
    kd_ang: float = 2.0


@dataclass(frozen=True)
class Waypoint:
    x: float
    y: float = 0.0
    theta: float = 0.0


def _clamp(v: float, lim: float) -> float:
    if v > lim:
        return lim
    if v < -lim:
        return -lim
    return v


def pd_control(state: FlyerState, wp: Waypoint, gains: PdGains) -> Tuple[float, float, float]:
    """Per-axis PD acceleration command, clamped to actuation authority."""
    ax = gains.kp * (wp.x - state.x) - gains.kd * state.vx
    ay = gains.kp * (wp.y - state.y) - gains.kd * state.vy
    alpha = gains.kp_ang * (wp.theta - state.theta) - gains.kd_ang * state.omega
    return (_clamp(ax, MAX_ACCEL), _clamp(ay, MAX_ACCEL), _clamp(alpha, MAX_ANG_ACCEL))


def step(state: FlyerState, accel: Tuple[float, float, float], dt_s: float,
         surface: Optional[PerchSurface] = None) -> None:
    """Advance one tick in place. Pinned bodies hold pose exactly.

    Surface contact is perfectly inelastic: the normal velocity component
    dies, tangential motion and spin survive, and the body never crosses
    the plane.
    """
    if state.pinned:
        state.vx = state.vy = state.omega = 0.0
        return
    ax, ay, alpha = accel
    state.vx += _clamp(ax, MAX_ACCEL) * dt_s
    state.vy += _clamp(ay, MAX_ACCEL) * dt_s
    state.omega += _clamp(alpha, MAX_ANG_ACCEL) * dt_s
    state.x += state.vx * dt_s
    state.y += state.vy * dt_s
    state.theta += state.omega * dt_s
    if surface is not None and state.x > surface.x_m:
        state.x = surface.x_m
        if state.vx > 0.0:
            state.vx = 0.0


def pin(state: FlyerState, surface: PerchSurface) -> None:
    state.pinned = True
    state.x = min(state.x, surface.x_m)
    state.vx = state.vy = state.omega = 0.0


def unpin(state: FlyerState) -> None:
    state.pinned = False


def tof_measure(gap_mm: float, rng: Optional[random.Random] = None,
                noise_mm: float = TOF_NOISE_MM) -> Tuple[int, bool]:
    """Quantized ranging read: (value_mm, valid). Validity is range-gated."""
    reading = gap_mm
    if rng is not None and noise_mm > 0.0:
        reading += rng.gauss(0.0, noise_mm)
    value = int(round(reading))
    valid = TOF_VALID_MIN_MM <= value <= TOF_VALID_MAX_MM
    return (max(0, value), valid)
