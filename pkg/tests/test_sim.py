"""Simulator stepping, sensing, disturbances, and both plant modes."""

import math
from dataclasses import replace

import numpy as np
import pytest

from omnispan.control import ControllerSuite, mix_commands
from omnispan.drive import BodyRates, BodyTwist
from omnispan.dynamics import MassPair
from omnispan.errors import ConfigError, ModeMismatch
from omnispan.mecanum import RigGeometry, inverse_kinematics
from omnispan.sim import (
    Disturbance,
    SensorNoise,
    SimConfig,
    Simulator,
    apply_pitch_dynamics,
    make_initial_state,
    step,
)

ZERO4 = (0.0, 0.0, 0.0, 0.0)


def instant_config(**kwargs):
    """Noiseless caster config with instant wheel tracking."""
    return SimConfig(wheel_speed_tracking_tau=0.0, **kwargs)


def wheels_for(config, rates, d=None):
    return tuple(
        inverse_kinematics(config.geometry, d if d is not None else config.d_initial, rates)
    )


def test_rest_step_only_advances_time():
    config = instant_config()
    state = make_initial_state(config)
    new, events = step(state, ZERO4, config)
    assert events == ()
    assert new.t == pytest.approx(config.dt)
    assert (new.x, new.y, new.phi, new.d) == (state.x, state.y, state.phi, state.d)
    assert new.rate == BodyRates(0.0, 0.0, 0.0, 0.0)


def test_constant_forward_speed_covers_one_meter():
    """Wheel setpoints for vx = 1 held for 1 s with instant tracking."""
    config = instant_config()
    sim = Simulator(config)
    setpoints = wheels_for(config, BodyRates(1.0, 0.0, 0.0, 0.0))
    for _ in range(round(1.0 / config.dt)):
        state = sim.step(setpoints)
    assert state.x == pytest.approx(1.0, abs=1e-9)
    assert abs(state.y) < 1e-9
    assert abs(state.phi) < 1e-9


def test_kinematic_consistency_with_instant_tracking():
    """Realized body rates equal the kinematics of the commanded wheels."""
    from omnispan.mecanum import WheelSpeeds, forward_kinematics

    config = instant_config()
    sim = Simulator(config)
    rng = np.random.default_rng(41)
    for _ in range(100):
        setpoints = tuple(rng.normal(0, 10.0, 4))
        d_applied = sim.state.d
        state = sim.step(setpoints)
        expected = forward_kinematics(config.geometry, d_applied, WheelSpeeds(*setpoints))
        # ddot may be zeroed at a spacing stop; compare the free channels
        assert abs(state.rate.vx - expected.vx) < 1e-12
        assert abs(state.rate.vy - expected.vy) < 1e-12
        assert abs(state.rate.wz - expected.wz) < 1e-12


def test_circle_returns_near_start():
    """Constant (vx, wz) for one full period lands back at the start."""
    config = instant_config(dt=0.001)
    sim = Simulator(config)
    v, omega = 0.5, math.pi / 5.0
    setpoints = None
    steps = round((2.0 * math.pi / omega) / config.dt)
    first = None
    for _ in range(steps):
        setpoints = wheels_for(config, BodyRates(v, 0.0, omega, 0.0), sim.state.d)
        state = sim.step(setpoints)
        if first is None:
            first = state
    deviation = math.hypot(state.x - first.x, state.y - first.y)
    assert deviation < 1e-3


def test_wheel_speed_lag_tracks_first_order():
    config = SimConfig(wheel_speed_tracking_tau=0.05)
    sim = Simulator(config)
    setpoints = (10.0, 10.0, 10.0, 10.0)
    state = sim.step(setpoints)
    expected = 10.0 * (1.0 - math.exp(-config.dt / 0.05))
    assert state.wheel_speeds[0] == pytest.approx(expected)
    for _ in range(round(1.0 / config.dt)):
        state = sim.step(setpoints)
    assert state.wheel_speeds[0] == pytest.approx(10.0, abs=1e-6)


def test_spacing_clamps_at_limits_with_event():
    config = instant_config()
    sim = Simulator(config)
    for _ in range(round(2.0 / config.dt)):
        grow = wheels_for(config, BodyRates(0.0, 0.0, 0.0, 0.5), sim.state.d)
        sim.step(grow)
    state = sim.state
    assert state.d == config.geometry.d_max
    assert state.rate.ddot == 0.0
    assert any(name == "spacing_limit_hit" for _, name in sim.events)


def test_sense_noiseless_equals_truth():
    config = instant_config()
    sim = Simulator(config)
    sim.step(wheels_for(config, BodyRates(0.5, 0.2, 0.1, 0.05)))
    frame = sim.sense()
    state = sim.state
    assert frame.t == state.t
    assert frame.d_measured == state.d
    assert frame.yaw == state.phi
    assert frame.yaw_rate == state.rate.wz
    assert frame.d_rate == state.rate.ddot
    assert frame.wheel_speeds_measured == state.wheel_speeds
    assert frame.pitch == 0.0


def test_sense_draw_wire_noise_within_four_sigma():
    """Relative draw-wire error of 0.1 % keeps almost every sample within
    +-0.4 % of the true spacing."""
    config = instant_config(
        d_initial=0.5, sensor_noise=SensorNoise(draw_wire_rel=0.001)
    )
    sim = Simulator(config)
    inside = 0
    n = 20000
    for _ in range(n):
        measured = sim.sense().d_measured
        if abs(measured - 0.5) <= 0.5 * 0.004:
            inside += 1
    assert inside / n > 0.999


def test_sense_seeded_reproducibility():
    config = instant_config(sensor_noise=SensorNoise(draw_wire_rel=0.001, imu_angle=0.01))
    frames_a = [Simulator(config).sense() for _ in range(1)]
    frames_b = [Simulator(config).sense() for _ in range(1)]
    assert frames_a == frames_b


def test_encoder_quantization():
    config = instant_config(sensor_noise=SensorNoise(encoder_quantum=0.5))
    sim = Simulator(config)
    sim.step(wheels_for(config, BodyRates(0.33, 0.0, 0.0, 0.0)))
    frame = sim.sense()
    for measured in frame.wheel_speeds_measured:
        assert measured == round(measured / 0.5) * 0.5


def test_pitch_dynamics_unstable_equilibrium():
    config = instant_config(mode="balance")
    state = make_initial_state(config)
    assert apply_pitch_dynamics(state, 0.0, config) == (0.0, 0.0)


def test_pitch_grows_without_control():
    config = instant_config(mode="balance")
    state = replace(make_initial_state(config), pitch=0.01)
    previous = 0.01
    for _ in range(round(0.5 / config.dt)):
        pitch, pitch_rate = apply_pitch_dynamics(state, 0.0, config)
        state = replace(state, pitch=pitch, pitch_rate=pitch_rate)
        assert state.pitch >= previous
        previous = state.pitch
    assert state.pitch > 0.02


def test_pitch_dynamics_requires_balance_mode():
    config = instant_config()
    with pytest.raises(ModeMismatch):
        apply_pitch_dynamics(make_initial_state(config), 0.0, config)


def test_balance_recovery_under_default_gains():
    """Closed loop: 0.05 rad initial lean is caught within two seconds."""
    config = SimConfig(mode="balance")
    sim = Simulator(config, initial=replace(make_initial_state(config), pitch=0.05))
    suite = ControllerSuite(config.geometry, config.gains)
    settled_at = None
    for i in range(round(3.0 / config.dt)):
        frame = sim.sense()
        correction = suite.balancing_step(frame, 0.0, config.dt)
        wheels = mix_commands(
            correction, 0.0, 0.0, BodyTwist(0, 0, 0), config.geometry, sim.state.d
        )
        state = sim.step(tuple(wheels))
        if abs(state.pitch) >= 0.01:
            settled_at = state.t
    assert settled_at is not None and settled_at < 2.0
    assert abs(sim.state.pitch) < 0.01


def test_zero_magnitude_disturbances_are_bit_identical():
    """An inactive disturbance must not change a single bit."""
    nulls = (
        Disturbance("incline", 0.0),
        Disturbance("mass_asymmetry", 0.0),
        Disturbance("lateral_push", 0.0),
        Disturbance("lateral_push", 5.0, t_start=100.0, t_end=200.0),
    )
    runs = []
    for disturbances in ((), nulls):
        config = instant_config(disturbances=disturbances)
        sim = Simulator(config)
        rows = []
        for i in range(400):
            rates = BodyRates(0.4, 0.2, 0.3, 0.02 if i < 200 else -0.02)
            state = sim.step(wheels_for(config, rates, sim.state.d))
            rows.append((state.x, state.y, state.phi, state.d, state.rate))
        runs.append(rows)
    assert runs[0] == runs[1]


def test_lateral_push_window():
    """A windowed push drifts the robot sideways only while active."""
    push = Disturbance("lateral_push", 8.0, t_start=0.5, t_end=1.0)
    config = instant_config(disturbances=(push,))
    sim = Simulator(config)
    y_at = {}
    for i in range(round(1.5 / config.dt)):
        state = sim.step(ZERO4)
        y_at[round(state.t, 3)] = state.y
    assert y_at[0.5] == 0.0
    assert y_at[1.0] > 0.0
    # after the window the drift rate returns to zero
    assert y_at[1.5] == pytest.approx(y_at[1.0], abs=1e-12)


def test_heading_drift_larger_for_lateral_motion():
    """Incline + mass asymmetry: lateral runs twist the heading, forward
    runs do not -- the parasitic wheel forces act on a moment arm only
    when the motion is along the axle line."""
    config = instant_config(
        ground_incline=(math.radians(0.5), 0.0),
        masses=MassPair(2.1, 1.9),
    )

    def run(rates):
        sim = Simulator(config)
        first = None
        for _ in range(400):
            state = sim.step(wheels_for(config, rates, sim.state.d))
            if first is None:
                first = state
        drift = abs(state.phi - first.phi)
        length = math.hypot(state.x - first.x, state.y - first.y)
        return drift / length

    forward_drift = run(BodyRates(0.5, 0.0, 0.0, 0.0))
    lateral_drift = run(BodyRates(0.0, 0.5, 0.0, 0.0))
    assert lateral_drift > forward_drift


def test_stiction_threshold_dominates_small_lateral_speeds():
    """With stiction on, a slow lateral command under a faster span change
    collapses to the span rate's half -- the sticking group stops."""
    config = instant_config(stiction_threshold=0.12)
    sim = Simulator(config)
    # vy = 0.1 -> group lateral speeds 0.1 +- 0.15; the slower one sticks
    rates = BodyRates(0.0, 0.1, 0.0, 0.3)
    state = sim.step(wheels_for(config, rates, sim.state.d))
    assert state.rate.vy == pytest.approx(abs(state.rate.ddot) / 2.0)


def test_force_mode_tracks_commanded_rates():
    config = instant_config(plant="force")
    sim = Simulator(config)
    target = BodyRates(0.3, 0.2, 0.4, 0.05)
    for _ in range(round(1.0 / config.dt)):
        state = sim.step(wheels_for(config, target, sim.state.d))
    for realized, wanted in zip(state.rate, target):
        assert realized == pytest.approx(wanted, abs=5e-3)


def test_force_mode_servo_rejects_spin_span_coupling():
    """Simultaneous spin and span change excite the Coriolis terms; the
    rate servo's inverse-dynamics feedforward must supply exactly those
    forces, so the uncommanded channels stay quiet."""
    from omnispan.dynamics import DynState, WheelGroupForces, forward_dynamics

    masses = MassPair(2.5, 1.5)
    config = instant_config(plant="force", masses=masses)
    sim = Simulator(config)
    target = BodyRates(0.0, 0.0, 1.5, 0.3)
    for _ in range(150):  # short enough that the span stays off its stops
        state = sim.step(wheels_for(config, target, sim.state.d))
    assert abs(state.rate.vx) < 1e-6
    # the coupling is real: coasting force-free at this state accelerates x
    coast = forward_dynamics(
        masses, DynState(state.rate, state.d), WheelGroupForces(0, 0, 0, 0)
    )
    assert abs(coast.x_ddot) > 1e-2


def test_force_mode_push_causes_lateral_droop():
    """A constant lateral push in force mode leaves the proportional rate
    servo with a steady-state lateral drift."""
    push = Disturbance("lateral_push", 6.0)
    config = instant_config(plant="force", disturbances=(push,))
    sim = Simulator(config)
    for _ in range(round(1.5 / config.dt)):
        state = sim.step(ZERO4)
    expected = (push.magnitude / config.masses.m_total) / config.force_servo_gain
    assert state.rate.vy == pytest.approx(expected, rel=1e-3)


def test_config_validation():
    with pytest.raises(ConfigError):
        SimConfig(dt=0.0)
    with pytest.raises(ConfigError):
        SimConfig(mode="hover")
    with pytest.raises(ConfigError):
        SimConfig(mode="balance", com_height=0.0)
    with pytest.raises(ConfigError):
        SimConfig(d_initial=0.1)
    with pytest.raises(ConfigError):
        Disturbance("gust", 1.0)
    with pytest.raises(ConfigError):
        SensorNoise(imu_angle=-0.1)


def test_geometry_override_range():
    geom = RigGeometry(d_min=0.3, d_max=0.6)
    with pytest.raises(ConfigError):
        SimConfig(geometry=geom, d_initial=0.7)
