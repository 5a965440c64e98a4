"""Deterministic time-stepping of the full robot.

Frames and state:
    world frame E: x right, y up (top-down view), heading phi measured
    from E_x to the body B_x axis, wrapped to (-pi, pi].
    body frame B: x forward, y along the axle line.

Plant, in the default "speed" mode: per-wheel speed setpoints are tracked
through a first-order lag (the stand-in for the hardware speed loop),
body rates follow from the wheel kinematics, and the pose is integrated
with semi-implicit Euler (rates first, then pose from the new rates).
"force" mode instead servo-controls the wheel groups with forces and
integrates the rigid-body dynamics, pseudo-forces included.

Pitch: with all wheels on one axle line the platform balances fore-aft.
Balance mode models that with an explicit stand-in -- a point mass at
``com_height`` on an inverted pendulum driven by the realized forward
acceleration.  Caster mode pins pitch to zero, which is what support
casters do on a bench unit.

Disturbances: ground incline enters as a constant body-force bias rotated
into the body frame; in speed mode it leaks into the realized rates as a
velocity-level slip (``incline_slip_gain``).  A left/right mass asymmetry
couples lateral motion into yaw (``asym_yaw_gain``): the parasitic drive
forces of the Mecanum wheels act along the axle line during forward
motion (no moment arm) but perpendicular to it during lateral motion,
where they sit a spacing apart and twist the heading.  Both gains are
config, both effects vanish identically when their inputs are zero, and
an inactive disturbance leaves the trajectory bit-identical.

Determinism: identical (config, seed, command stream) produces a
bit-identical trajectory.  One stepping agent owns the mutable state;
every step publishes an immutable snapshot for concurrent readers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .control import SensorFrame, SuiteGains
from .drive import BodyRates, span_inverse, wrap_angle
from .dynamics import (
    BodyAccel,
    DynState,
    MassPair,
    WheelGroupForces,
    forward_dynamics,
    inverse_dynamics,
)
from .errors import ConfigError, ModeMismatch
from .mecanum import RigGeometry, WheelSpeeds, forward_kinematics, inverse_kinematics

GRAVITY = 9.81

Vec2 = tuple[float, float]
Vec4 = tuple[float, float, float, float]

ZERO4: Vec4 = (0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class SensorNoise:
    """Per-channel noise levels; every channel is exact at 0.

    draw_wire_rel is a relative standard deviation (the draw-wire sensor
    is specified at +-0.1 %, i.e. 0.001); the others are absolute standard
    deviations in SI units.  encoder_quantum is a quantization step in
    rad/s rather than a noise level.
    """

    draw_wire_rel: float = 0.0
    d_rate: float = 0.0
    imu_angle: float = 0.0
    imu_rate: float = 0.0
    encoder_quantum: float = 0.0
    accel: float = 0.0

    def __post_init__(self) -> None:
        for name in ("draw_wire_rel", "d_rate", "imu_angle", "imu_rate", "encoder_quantum", "accel"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"sensor noise {name} must be >= 0")


@dataclass(frozen=True)
class Disturbance:
    """One disturbance with an activation window.

    kind "incline": extra ground slope of ``magnitude`` radians along the
    world-frame ``direction``.  kind "mass_asymmetry": shifts the group
    mass fractions by ``magnitude`` toward the left group.  kind
    "lateral_push": constant body-frame +y force of ``magnitude`` Newtons.
    """

    kind: str
    magnitude: float
    t_start: float = 0.0
    t_end: float = math.inf
    direction: Vec2 = (1.0, 0.0)

    def __post_init__(self) -> None:
        if self.kind not in ("incline", "mass_asymmetry", "lateral_push"):
            raise ConfigError(f"unknown disturbance kind {self.kind!r}")

    def active(self, t: float) -> bool:
        return self.magnitude != 0.0 and self.t_start <= t < self.t_end


@dataclass(frozen=True)
class SimConfig:
    """Everything a run needs; identical configs give identical runs."""

    dt: float = 0.005
    mode: str = "caster"
    geometry: RigGeometry = field(default_factory=RigGeometry)
    masses: MassPair = field(default_factory=lambda: MassPair(2.0, 2.0))
    d_initial: float = 0.4
    com_height: float = 0.3
    ground_incline: Vec2 = (0.0, 0.0)
    sensor_noise: SensorNoise = field(default_factory=SensorNoise)
    wheel_speed_tracking_tau: float = 0.05
    seed: int = 0
    plant: str = "speed"
    force_servo_gain: float = 20.0
    incline_slip_gain: float = 0.01
    asym_yaw_gain: float = 0.5
    stiction_threshold: float = 0.0
    command_limits: Vec4 = (1.0, 1.0, 2.0, 0.5)
    gains: SuiteGains = field(default_factory=SuiteGains)
    disturbances: tuple[Disturbance, ...] = ()

    def __post_init__(self) -> None:
        if not self.dt > 0.0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if self.mode not in ("caster", "balance"):
            raise ConfigError(f"mode must be caster or balance, got {self.mode!r}")
        if self.plant not in ("speed", "force"):
            raise ConfigError(f"plant must be speed or force, got {self.plant!r}")
        if self.mode == "balance" and not self.com_height > 0.0:
            raise ConfigError("com_height must be > 0 in balance mode")
        if not self.geometry.d_min <= self.d_initial <= self.geometry.d_max:
            raise ConfigError(
                f"d_initial {self.d_initial} outside "
                f"[{self.geometry.d_min}, {self.geometry.d_max}]"
            )
        if self.wheel_speed_tracking_tau < 0.0:
            raise ConfigError("wheel_speed_tracking_tau must be >= 0")
        if any(limit <= 0.0 for limit in self.command_limits):
            raise ConfigError("command limits must be > 0")


@dataclass(frozen=True)
class RobotState:
    """Full simulation state; immutable snapshot."""

    d: float
    t: float = 0.0
    x: float = 0.0
    y: float = 0.0
    phi: float = 0.0
    rate: BodyRates = BodyRates(0.0, 0.0, 0.0, 0.0)
    pitch: float = 0.0
    pitch_rate: float = 0.0
    wheel_angles: Vec4 = ZERO4
    wheel_speeds: Vec4 = ZERO4
    accel: Vec2 = (0.0, 0.0)


def make_initial_state(config: SimConfig) -> RobotState:
    return RobotState(d=config.d_initial)


def _pendulum_update(
    pitch: float, pitch_rate: float, x_accel: float, config: SimConfig
) -> tuple[float, float]:
    pitch_accel = (
        GRAVITY * math.sin(pitch) - x_accel * math.cos(pitch)
    ) / config.com_height
    new_rate = pitch_rate + pitch_accel * config.dt
    return pitch + new_rate * config.dt, new_rate


def apply_pitch_dynamics(
    state: RobotState, x_accel_cmd: float, config: SimConfig
) -> tuple[float, float]:
    """Advance the balance stand-in one step; (pitch, pitch_rate).

    The base acceleration enters the pendulum the usual inverted way:
    accelerating under the lean reduces it.
    """
    if config.mode != "balance":
        raise ModeMismatch("pitch dynamics only run in balance mode")
    return _pendulum_update(state.pitch, state.pitch_rate, x_accel_cmd, config)


def _mass_asymmetry(config: SimConfig, t: float) -> float:
    asym = (config.masses.m_left - config.masses.m_right) / config.masses.m_total
    for dist in config.disturbances:
        if dist.kind == "mass_asymmetry" and dist.active(t):
            asym += dist.magnitude
    return asym


def _incline_accel_world(config: SimConfig, t: float) -> Vec2:
    """Unresisted gravity pull along the floor, world frame, m/s^2."""
    ix, iy = config.ground_incline
    for dist in config.disturbances:
        if dist.kind == "incline" and dist.active(t):
            ix += dist.magnitude * dist.direction[0]
            iy += dist.magnitude * dist.direction[1]
    if ix == 0.0 and iy == 0.0:
        return (0.0, 0.0)
    return (GRAVITY * math.sin(ix), GRAVITY * math.sin(iy))


def _push_force(config: SimConfig, t: float) -> float:
    force = 0.0
    for dist in config.disturbances:
        if dist.kind == "lateral_push" and dist.active(t):
            force += dist.magnitude
    return force


def _disturbance_accel_body(config: SimConfig, t: float, phi: float) -> Vec2:
    ax_w, ay_w = _incline_accel_world(config, t)
    push = _push_force(config, t)
    if ax_w == 0.0 and ay_w == 0.0 and push == 0.0:
        return (0.0, 0.0)
    c, s = math.cos(phi), math.sin(phi)
    return (c * ax_w + s * ay_w, -s * ax_w + c * ay_w + push / config.masses.m_total)


def _apply_speed_slip(
    rate: BodyRates, state: RobotState, config: SimConfig
) -> BodyRates:
    """Velocity-level disturbance response of the speed-mode plant."""
    accel_body = _disturbance_accel_body(config, state.t, state.phi)
    asym = _mass_asymmetry(config, state.t)
    if accel_body == (0.0, 0.0) and asym == 0.0 and config.stiction_threshold == 0.0:
        return rate
    vx = rate.vx + config.incline_slip_gain * accel_body[0]
    vy = rate.vy + config.incline_slip_gain * accel_body[1]
    wz = rate.wz
    ddot = rate.ddot
    if asym != 0.0 and vy != 0.0:
        wz += config.asym_yaw_gain * asym * vy / state.d
    if config.stiction_threshold > 0.0:
        groups = span_inverse(BodyRates(vx, vy, wz, ddot), state.d)
        vy_left = 0.0 if abs(groups.vy_left) < config.stiction_threshold else groups.vy_left
        vy_right = 0.0 if abs(groups.vy_right) < config.stiction_threshold else groups.vy_right
        vy = (vy_left + vy_right) / 2.0
        ddot = vy_left - vy_right
    return BodyRates(vx, vy, wz, ddot)


def _track_wheel_speeds(state: RobotState, setpoints: Vec4, config: SimConfig) -> Vec4:
    tau = config.wheel_speed_tracking_tau
    if tau <= 0.0:
        return tuple(setpoints)
    decay = math.exp(-config.dt / tau)
    return tuple(
        sp + (current - sp) * decay
        for sp, current in zip(setpoints, state.wheel_speeds)
    )


def _force_mode_rates(state: RobotState, setpoints: Vec4, config: SimConfig) -> BodyRates:
    """One force-mode update: rate servo through the rigid-body dynamics.

    The wheel setpoints define target body rates; a proportional rate
    servo picks the acceleration, the inverse dynamics turn it into group
    forces (pseudo-force feedforward included), disturbances add their
    own body forces on top, and the forward dynamics integrate the lot.
    """
    geom = config.geometry
    masses = config.masses
    dyn = DynState(state.rate, state.d)
    target = forward_kinematics(geom, state.d, WheelSpeeds(*setpoints))
    k = config.force_servo_gain
    wanted = BodyAccel(
        k * (target.vx - state.rate.vx),
        k * (target.vy - state.rate.vy),
        k * (target.wz - state.rate.wz),
        k * (target.ddot - state.rate.ddot),
    )
    forces = inverse_dynamics(masses, dyn, wanted)
    ax_b, ay_b = _disturbance_accel_body(config, state.t, state.phi)
    if ax_b != 0.0 or ay_b != 0.0:
        forces = WheelGroupForces(
            forces.fx_left + masses.m_left * ax_b,
            forces.fy_left + masses.m_left * ay_b,
            forces.fx_right + masses.m_right * ax_b,
            forces.fy_right + masses.m_right * ay_b,
        )
    accel = forward_dynamics(masses, dyn, forces)
    dt = config.dt
    return BodyRates(
        state.rate.vx + accel.x_ddot * dt,
        state.rate.vy + accel.y_ddot * dt,
        state.rate.wz + accel.phi_ddot * dt,
        state.rate.ddot + accel.d_ddot * dt,
    )


def step(
    state: RobotState, wheel_setpoints: Vec4, config: SimConfig
) -> tuple[RobotState, tuple[str, ...]]:
    """Advance one step; returns the new state and any events raised.

    Events (currently only ``spacing_limit_hit``) report conditions that
    the plant absorbed rather than failed on.
    """
    dt = config.dt
    geom = config.geometry
    events: tuple[str, ...] = ()

    if config.plant == "force":
        rate = _force_mode_rates(state, wheel_setpoints, config)
        speeds = tuple(inverse_kinematics(geom, state.d, rate))
    else:
        speeds = _track_wheel_speeds(state, wheel_setpoints, config)
        rate = forward_kinematics(geom, state.d, WheelSpeeds(*speeds))
        rate = _apply_speed_slip(rate, state, config)

    accel = ((rate.vx - state.rate.vx) / dt, (rate.vy - state.rate.vy) / dt)

    if config.mode == "balance":
        pitch, pitch_rate = _pendulum_update(state.pitch, state.pitch_rate, accel[0], config)
    else:
        pitch, pitch_rate = 0.0, 0.0

    # Semi-implicit: the pose advances on the freshly updated rates.
    c, s = math.cos(state.phi), math.sin(state.phi)
    x = state.x + (rate.vx * c - rate.vy * s) * dt
    y = state.y + (rate.vx * s + rate.vy * c) * dt
    phi = wrap_angle(state.phi + rate.wz * dt)

    d = state.d + rate.ddot * dt
    if d > geom.d_max:
        d = geom.d_max
        rate = rate._replace(ddot=0.0)
        events += ("spacing_limit_hit",)
    elif d < geom.d_min:
        d = geom.d_min
        rate = rate._replace(ddot=0.0)
        events += ("spacing_limit_hit",)

    angles = tuple(a + w * dt for a, w in zip(state.wheel_angles, speeds))

    new_state = RobotState(
        d=d,
        t=state.t + dt,
        x=x,
        y=y,
        phi=phi,
        rate=rate,
        pitch=pitch,
        pitch_rate=pitch_rate,
        wheel_angles=angles,
        wheel_speeds=speeds,
        accel=accel,
    )
    return new_state, events


def sense(state: RobotState, config: SimConfig, rng: np.random.Generator) -> SensorFrame:
    """Synthesize one sensor frame; exact truth when all noise is zero."""
    noise = config.sensor_noise

    def gauss(std: float) -> float:
        return float(rng.normal(0.0, std)) if std > 0.0 else 0.0

    if noise.encoder_quantum > 0.0:
        q = noise.encoder_quantum
        wheel_speeds = tuple(round(w / q) * q for w in state.wheel_speeds)
    else:
        wheel_speeds = tuple(state.wheel_speeds)

    return SensorFrame(
        t=state.t,
        pitch=state.pitch + gauss(noise.imu_angle),
        pitch_rate=state.pitch_rate + gauss(noise.imu_rate),
        yaw=wrap_angle(state.phi + gauss(noise.imu_angle)),
        yaw_rate=state.rate.wz + gauss(noise.imu_rate),
        d_measured=state.d * (1.0 + gauss(noise.draw_wire_rel)),
        d_rate=state.rate.ddot + gauss(noise.d_rate),
        wheel_speeds_measured=wheel_speeds,
        accel_body=(state.accel[0] + gauss(noise.accel), state.accel[1] + gauss(noise.accel)),
    )


class Simulator:
    """Owns the mutable state, the event trail, and the noise stream.

    Exactly one agent may call :meth:`step`; the returned snapshots are
    immutable and safe to hand to concurrent readers.
    """

    def __init__(self, config: SimConfig, initial: RobotState | None = None):
        self.config = config
        self.state = initial if initial is not None else make_initial_state(config)
        self.rng = np.random.default_rng(config.seed)
        self.events: list[tuple[float, str]] = []

    def reset(self) -> None:
        self.state = make_initial_state(self.config)
        self.rng = np.random.default_rng(self.config.seed)
        self.events.clear()

    def set_spacing(self, d: float) -> None:
        """Reposition the spacing (e.g. a script's starting span)."""
        geom = self.config.geometry
        if not geom.d_min <= d <= geom.d_max:
            d = min(max(d, geom.d_min), geom.d_max)
        self.state = replace(self.state, d=d)

    def step(self, wheel_setpoints: Vec4) -> RobotState:
        self.state, events = step(self.state, wheel_setpoints, self.config)
        for event in events:
            self.events.append((self.state.t, event))
        return self.state

    def sense(self) -> SensorFrame:
        return sense(self.state, self.config, self.rng)
