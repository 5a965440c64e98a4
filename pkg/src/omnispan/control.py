"""The four cascaded control loops and the command mixer.

Loop layout:

* balancing: PD on the pitch angle and pitch rate, plus a PI loop on the
  forward velocity and a positive velocity feedback term; outputs an x
  speed correction (m/s).
* steering: PD on the wrapped yaw error, derivative taken from the
  measured yaw rate; outputs a yaw rate command (rad/s).
* distance: outer PD on the spacing error producing a spacing-rate
  setpoint, inner PI on the spacing rate; outputs a spacing-rate command
  (m/s).  The inner integral removes steady-state spacing error.
* motor: PI per wheel on speed error; outputs normalized drive effort in
  [-1, 1].  The current loop below it is hardware territory and is not
  modeled.

The mixer stacks the operator twist with the three loop outputs into one
body-rate vector and maps it to per-wheel speed setpoints.

Every loop is a plain float recurrence: identical input sequences produce
bit-identical outputs.  A suite instance must be stepped by one caller at
a time; its outputs are plain floats and safe to share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .drive import BodyRates, BodyTwist, clamp, wrap_angle
from .errors import BadWheelIndex, NonPositiveDt
from .mecanum import RigGeometry, WheelSpeeds, forward_kinematics, inverse_kinematics


@dataclass(frozen=True)
class PidGains:
    """Gains and limits of one PID loop."""

    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0
    output_min: float = -math.inf
    output_max: float = math.inf
    integral_limit: float = math.inf

    def __post_init__(self) -> None:
        if not self.output_min < self.output_max:
            raise ValueError("output_min must be < output_max")
        if self.integral_limit < 0.0:
            raise ValueError("integral_limit must be >= 0")


@dataclass
class PidMemory:
    """Persistent state of one PID loop."""

    integral_accum: float = 0.0
    prev_error: float = 0.0
    initialized: bool = False

    def reset(self) -> None:
        self.integral_accum = 0.0
        self.prev_error = 0.0
        self.initialized = False


def pid_step(gains: PidGains, memory: PidMemory, error: float, dt: float) -> float:
    """One PID update: clamp(kp*e + ki*int(e) + kd*de/dt).

    The integral is clamped to +-integral_limit (anti-windup); the
    derivative is a backward difference, zero on the first sample.
    """
    if not dt > 0.0:
        raise NonPositiveDt(f"dt must be > 0, got {dt}")
    memory.integral_accum = clamp(
        memory.integral_accum + error * dt,
        -gains.integral_limit,
        gains.integral_limit,
    )
    derivative = (error - memory.prev_error) / dt if memory.initialized else 0.0
    memory.prev_error = error
    memory.initialized = True
    return clamp(
        gains.kp * error + gains.ki * memory.integral_accum + gains.kd * derivative,
        gains.output_min,
        gains.output_max,
    )


@dataclass(frozen=True)
class SensorFrame:
    """One time-stamped sensor snapshot consumed by the loops."""

    t: float
    pitch: float
    pitch_rate: float
    yaw: float
    yaw_rate: float
    d_measured: float
    d_rate: float
    wheel_speeds_measured: tuple[float, float, float, float]
    accel_body: tuple[float, float]


@dataclass(frozen=True)
class SuiteGains:
    """Shipped default gains for all four loops.

    The balance set stabilizes the point-mass pendulum stand-in through
    the wheel-speed lag.  Note the net velocity coefficient is positive
    (k_pf exceeds the velocity loop's kp): on a velocity-interface
    balancer the controller must keep feeding speed into the fall to
    catch it, and the positive feedback term is what prevents the
    velocity loop from fighting that.
    """

    balance_pitch: PidGains = PidGains(kp=2.0, kd=0.35, output_min=-2.0, output_max=2.0)
    balance_velocity: PidGains = PidGains(
        kp=0.4, ki=0.0, output_min=-2.0, output_max=2.0, integral_limit=0.5
    )
    k_pf: float = 1.7
    steering: PidGains = PidGains(kp=2.5, kd=0.2, output_min=-2.0, output_max=2.0)
    distance_outer: PidGains = PidGains(kp=3.0, kd=0.1, output_min=-0.5, output_max=0.5)
    distance_inner: PidGains = PidGains(
        kp=2.0, ki=8.0, output_min=-0.5, output_max=0.5, integral_limit=1.0
    )
    motor: PidGains = PidGains(
        kp=0.1, ki=2.0, output_min=-1.0, output_max=1.0, integral_limit=0.5
    )


@dataclass
class ControllerSuite:
    """Gain set plus the persistent memory of all four loops."""

    geometry: RigGeometry
    gains: SuiteGains = field(default_factory=SuiteGains)
    _velocity_mem: PidMemory = field(default_factory=PidMemory, repr=False)
    _distance_mem: PidMemory = field(default_factory=PidMemory, repr=False)
    _motor_mem: tuple[PidMemory, ...] = field(
        default_factory=lambda: tuple(PidMemory() for _ in range(4)), repr=False
    )

    def reset(self) -> None:
        self._velocity_mem.reset()
        self._distance_mem.reset()
        for mem in self._motor_mem:
            mem.reset()

    def measured_forward_speed(self, sensors: SensorFrame) -> float:
        """Odometry forward speed from encoders and the draw-wire spacing."""
        return forward_kinematics(
            self.geometry,
            clamp(sensors.d_measured, self.geometry.d_min, self.geometry.d_max),
            WheelSpeeds(*sensors.wheel_speeds_measured),
        ).vx

    def balancing_step(
        self, sensors: SensorFrame, velocity_setpoint: float, dt: float
    ) -> float:
        """x speed correction from pitch PD + velocity PI + positive feedback."""
        if not dt > 0.0:
            raise NonPositiveDt(f"dt must be > 0, got {dt}")
        g = self.gains
        pd = g.balance_pitch.kp * sensors.pitch + g.balance_pitch.kd * sensors.pitch_rate
        v = self.measured_forward_speed(sensors)
        pi = pid_step(g.balance_velocity, self._velocity_mem, velocity_setpoint - v, dt)
        return clamp(
            pd + pi + g.k_pf * v,
            g.balance_pitch.output_min,
            g.balance_pitch.output_max,
        )

    def steering_step(self, sensors: SensorFrame, yaw_setpoint: float, dt: float) -> float:
        """Yaw rate command from PD on the wrapped yaw error."""
        if not dt > 0.0:
            raise NonPositiveDt(f"dt must be > 0, got {dt}")
        g = self.gains.steering
        error = wrap_angle(yaw_setpoint - sensors.yaw)
        return clamp(
            g.kp * error - g.kd * sensors.yaw_rate, g.output_min, g.output_max
        )

    def distance_step(self, sensors: SensorFrame, d_setpoint: float, dt: float) -> float:
        """Spacing-rate command from the outer PD / inner PI cascade."""
        if not dt > 0.0:
            raise NonPositiveDt(f"dt must be > 0, got {dt}")
        outer = self.gains.distance_outer
        rate_setpoint = clamp(
            outer.kp * (d_setpoint - sensors.d_measured) - outer.kd * sensors.d_rate,
            outer.output_min,
            outer.output_max,
        )
        command = pid_step(
            self.gains.distance_inner,
            self._distance_mem,
            rate_setpoint - sensors.d_rate,
            dt,
        )
        # Never push the spacing past its mechanical stops.
        if sensors.d_measured >= self.geometry.d_max and command > 0.0:
            return 0.0
        if sensors.d_measured <= self.geometry.d_min and command < 0.0:
            return 0.0
        return command

    def motor_step(
        self, wheel_index: int, speed_setpoint: float, speed_measured: float, dt: float
    ) -> float:
        """Normalized drive effort in [-1, 1] from PI on wheel speed error."""
        if wheel_index not in (1, 2, 3, 4):
            raise BadWheelIndex(f"wheel index must be 1..4, got {wheel_index}")
        return pid_step(
            self.gains.motor,
            self._motor_mem[wheel_index - 1],
            speed_setpoint - speed_measured,
            dt,
        )


def mix_commands(
    balance_correction: float,
    steer_command: float,
    d_rate_command: float,
    operator_twist: BodyTwist,
    geom: RigGeometry,
    d: float,
) -> WheelSpeeds:
    """Stack loop outputs with the operator twist and map to wheel setpoints.

    The assembled body-rate vector is
    (operator vx + balance correction, operator vy, steer command,
    spacing-rate command); the operator's wz channel is carried by the
    steering command.
    """
    rates = BodyRates(
        operator_twist.vx + balance_correction,
        operator_twist.vy,
        steer_command,
        d_rate_command,
    )
    return inverse_kinematics(geom, d, rates)
