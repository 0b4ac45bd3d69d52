import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geckosim.flyer import (
    MAX_ACCEL,
    FlyerState,
    PdGains,
    PerchSurface,
    Waypoint,
    pd_control,
    pin,
    step,
    tof_measure,
    unpin,
)


class TestIntegrator:
    def test_drifts_at_constant_velocity(self):
        s = FlyerState(vx=0.02)
        for _ in range(100):
            step(s, (0.0, 0.0, 0.0), 0.05)
        assert s.x == pytest.approx(0.02 * 5.0)
        assert s.vx == pytest.approx(0.02)

    def test_velocity_conserved_with_zero_accel(self):
        # semi-implicit Euler leaves v untouched when a == 0
        s = FlyerState(vx=0.0123456789, vy=-0.04, omega=0.002)
        v0 = (s.vx, s.vy, s.omega)
        for _ in range(10000):
            step(s, (0.0, 0.0, 0.0), 0.05)
        assert abs(s.vx - v0[0]) < 1e-12
        assert abs(s.vy - v0[1]) < 1e-12
        assert abs(s.omega - v0[2]) < 1e-12

    def test_accel_clamped(self):
        s = FlyerState()
        step(s, (99.0, -99.0, 0.0), 1.0)
        assert s.vx == pytest.approx(MAX_ACCEL)
        assert s.vy == pytest.approx(-MAX_ACCEL)

    @given(
        vx=st.floats(-0.5, 0.5),
        ax=st.floats(-10.0, 10.0),
        dt=st.floats(0.001, 0.2),
    )
    @settings(max_examples=300, deadline=None)
    def test_speed_change_bounded_by_authority(self, vx, ax, dt):
        s = FlyerState(vx=vx)
        step(s, (ax, 0.0, 0.0), dt)
        assert abs(s.vx - vx) <= MAX_ACCEL * dt + 1e-12


class TestContact:
    def test_inelastic_stop_at_surface(self):
        surface = PerchSurface(0.0)
        s = FlyerState(x=-0.001, vx=0.05)
        step(s, (0.0, 0.0, 0.0), 0.05, surface)
        assert s.x == 0.0
        assert s.vx == 0.0

    def test_tangential_motion_survives_contact(self):
        surface = PerchSurface(0.0)
        s = FlyerState(x=-0.001, vx=0.05, vy=0.02, omega=0.01)
        step(s, (0.0, 0.0, 0.0), 0.05, surface)
        assert s.vy == pytest.approx(0.02)
        assert s.omega == pytest.approx(0.01)

    def test_never_penetrates(self):
        surface = PerchSurface(0.0)
        s = FlyerState(x=-0.2, vx=0.09)
        for _ in range(2000):
            step(s, (0.1, 0.0, 0.0), 0.05, surface)
            assert s.x <= surface.x_m + 1e-15

    def test_pin_freezes_and_unpin_frees(self):
        surface = PerchSurface(0.0)
        s = FlyerState(x=-0.0005, vx=0.03)
        pin(s, surface)
        step(s, (0.1, 0.1, 0.1), 0.05, surface)
        assert s.pinned and s.vx == 0.0 and s.x == -0.0005
        unpin(s)
        step(s, (0.1, 0.0, 0.0), 0.05, surface)
        assert s.vx > 0.0


class TestPdControl:
    def test_accelerates_toward_waypoint(self):
        s = FlyerState(x=-1.0)
        ax, ay, alpha = pd_control(s, Waypoint(0.0), PdGains())
        assert ax == MAX_ACCEL  # saturated toward the surface

    def test_damps_velocity(self):
        s = FlyerState(x=0.0, vx=0.5)
        ax, _, _ = pd_control(s, Waypoint(0.0), PdGains())
        assert ax == -MAX_ACCEL

    def test_settles_near_waypoint(self):
        s = FlyerState(x=-0.4)
        wp = Waypoint(0.0)
        gains = PdGains()
        for _ in range(3000):
            step(s, pd_control(s, wp, gains), 0.05)
        assert abs(s.x) < 0.01
        assert abs(s.vx) < 0.002

    def test_terminal_speed_tracks_depth(self):
        # waypoint behind the surface sets the closing speed near kp/kd*depth
        surface = PerchSurface(0.0)
        gains = PdGains(kp=0.5, kd=2.5)
        s = FlyerState(x=-0.5)
        wp = Waypoint(0.15)
        speed_at_contact = None
        for _ in range(4000):
            prev_vx = s.vx
            step(s, pd_control(s, wp, gains), 0.05, surface)
            if s.x >= surface.x_m and speed_at_contact is None:
                speed_at_contact = prev_vx
                break
        assert speed_at_contact is not None
        assert 0.020 <= speed_at_contact <= 0.050


class TestTofSensor:
    def test_noise_free_quantizes(self):
        assert tof_measure(42.4, None, 0.0) == (42, True)
        assert tof_measure(42.6, None, 0.0) == (43, True)

    def test_range_gating(self):
        assert tof_measure(4.0, None, 0.0) == (4, False)
        assert tof_measure(101.0, None, 0.0) == (101, False)
        assert tof_measure(5.0, None, 0.0) == (5, True)
        assert tof_measure(100.0, None, 0.0) == (100, True)

    def test_negative_clamps_to_zero(self):
        value, valid = tof_measure(-3.0, None, 0.0)
        assert value == 0 and not valid

    def test_noise_is_seeded(self):
        a = [tof_measure(50.0, random.Random(5))[0] for _ in range(20)]
        b = [tof_measure(50.0, random.Random(5))[0] for _ in range(20)]
        assert a == b

    def test_noise_spread_about_one_mm(self):
        rng = random.Random(11)
        vals = [tof_measure(50.0, rng)[0] for _ in range(5000)]
        mean = sum(vals) / len(vals)
        var = sum((v - mean) ** 2 for v in vals) / len(vals)
        assert abs(mean - 50.0) < 0.1
        assert 0.7 < math.sqrt(var) < 1.4  # quantization widens it a bit
