"""Scripted trajectory studies: command scripts, the run loop, metrics.

Built-in scripts cover the standard bench studies: axis-aligned
square and diagonal rhombus translations, the two circle drives (forward
speed + spin, lateral speed + spin), and three spacing sweeps that hold
one rate constant while the span runs its full mechanical range and back.

A run steps the simulator with the control stack in the loop; segments
command body rates directly, or engage the steering / distance loops when
they carry a yaw or spacing setpoint.  One log row is appended after each
step, so the first row is the state one step into the run and closed
paths land back on it up to one step of motion -- endpoint deviations of
closure studies shrink at first order in dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .control import ControllerSuite, mix_commands
from .drive import BodyRates, BodyTwist, wrap_angle
from .errors import UnknownScript
from .sim import SimConfig, Simulator
from .trajlog import TrajectoryLog

ZERO_RATES = BodyRates(0.0, 0.0, 0.0, 0.0)

BUILTIN_NAMES = (
    "square",
    "rhombus",
    "circle_xz",
    "circle_yz",
    "d_sweep_x",
    "d_sweep_y",
    "d_sweep_spin",
)


@dataclass(frozen=True)
class Segment:
    """One script segment: hold the given setpoints for ``duration`` seconds.

    Rates are commanded directly unless a yaw or spacing setpoint is
    present, in which case the corresponding loop takes over that channel.
    """

    duration: float
    rates: BodyRates = ZERO_RATES
    yaw_setpoint: float | None = None
    d_setpoint: float | None = None

    def __post_init__(self) -> None:
        if not self.duration > 0.0:
            raise ValueError(f"segment duration must be > 0, got {self.duration}")


@dataclass(frozen=True)
class CommandScript:
    """Named, ordered list of segments, optionally with a starting span."""

    name: str
    segments: tuple[Segment, ...]
    d_start: float | None = None


@dataclass(frozen=True)
class RunMetrics:
    """Deviation metrics of one trajectory log.

    endpoint_deviation  distance from the final position back to the start
    loop_deviation      closest approach to the start over the final
                        quarter of the run (the "one loop" figure for
                        circle scripts)
    heading_drift       |wrapped heading change| start to end
    path_length         integrated travel distance
    """

    endpoint_deviation: float
    loop_deviation: float
    heading_drift: float
    path_length: float


def _d_sweep_segments(rates: BodyRates, d_min: float, d_max: float) -> tuple[Segment, ...]:
    # Ramp slightly past each stop so the clamp pins the span at exactly
    # d_min / d_max; the sweep then ends on precisely its starting value.
    sweep_rate = 0.25
    ramp = 1.1 * (d_max - d_min) / sweep_rate
    ramp = math.ceil(ramp * 10.0) / 10.0
    hold = 0.5
    return (
        Segment(hold, rates),
        Segment(ramp, rates._replace(ddot=sweep_rate)),
        Segment(hold, rates),
        Segment(ramp, rates._replace(ddot=-sweep_rate)),
        Segment(hold, rates),
    )


def builtin_script(
    name: str,
    v: float = 0.5,
    omega: float = math.pi / 5.0,
    leg: float = 1.0,
    d_min: float = 0.25,
    d_max: float = 0.8,
) -> CommandScript:
    """Construct one of the named bench scripts.

    v and omega are the commanded speed magnitudes, leg the straight-leg
    length of the square/rhombus; the spacing sweeps need the rig's span
    limits to plan their ramps.
    """
    leg_time = leg / v
    if name == "square":
        segments = (
            Segment(leg_time, BodyRates(v, 0.0, 0.0, 0.0)),
            Segment(leg_time, BodyRates(0.0, v, 0.0, 0.0)),
            Segment(leg_time, BodyRates(-v, 0.0, 0.0, 0.0)),
            Segment(leg_time, BodyRates(0.0, -v, 0.0, 0.0)),
        )
    elif name == "rhombus":
        segments = (
            Segment(leg_time, BodyRates(v, v, 0.0, 0.0)),
            Segment(leg_time, BodyRates(-v, v, 0.0, 0.0)),
            Segment(leg_time, BodyRates(-v, -v, 0.0, 0.0)),
            Segment(leg_time, BodyRates(v, -v, 0.0, 0.0)),
        )
    elif name == "circle_xz":
        segments = (Segment(2.0 * math.pi / omega, BodyRates(v, 0.0, omega, 0.0)),)
    elif name == "circle_yz":
        segments = (Segment(2.0 * math.pi / omega, BodyRates(0.0, v, omega, 0.0)),)
    elif name == "d_sweep_x":
        segments = _d_sweep_segments(BodyRates(v, 0.0, 0.0, 0.0), d_min, d_max)
    elif name == "d_sweep_y":
        segments = _d_sweep_segments(BodyRates(0.0, v, 0.0, 0.0), d_min, d_max)
    elif name == "d_sweep_spin":
        segments = _d_sweep_segments(BodyRates(0.0, 0.0, omega, 0.0), d_min, d_max)
    else:
        raise UnknownScript(f"no built-in script named {name!r}")
    d_start = d_min if name.startswith("d_sweep") else None
    return CommandScript(name=name, segments=segments, d_start=d_start)


def run_script(script: CommandScript, config: SimConfig) -> TrajectoryLog:
    """Run a script through the control stack; one log row per step."""
    if not script.segments:
        raise UnknownScript(f"script {script.name!r} has no segments")
    sim = Simulator(config)
    if script.d_start is not None:
        sim.set_spacing(script.d_start)
    suite = ControllerSuite(config.geometry, config.gains)
    log = TrajectoryLog()
    dt = config.dt

    for segment in script.segments:
        steps = max(1, round(segment.duration / dt))
        for _ in range(steps):
            frame = sim.sense()
            if config.mode == "balance":
                balance_corr = suite.balancing_step(frame, segment.rates.vx, dt)
            else:
                balance_corr = 0.0
            if segment.yaw_setpoint is not None:
                steer = suite.steering_step(frame, segment.yaw_setpoint, dt)
            else:
                steer = segment.rates.wz
            if segment.d_setpoint is not None:
                d_rate_cmd = suite.distance_step(frame, segment.d_setpoint, dt)
            else:
                d_rate_cmd = segment.rates.ddot
            wheels = mix_commands(
                balance_corr,
                steer,
                d_rate_cmd,
                BodyTwist(segment.rates.vx, segment.rates.vy, 0.0),
                config.geometry,
                sim.state.d,
            )
            state = sim.step(tuple(wheels))
            log.append(
                (
                    state.t,
                    state.x,
                    state.y,
                    state.phi,
                    state.d,
                    state.pitch,
                    state.rate.vx,
                    state.rate.vy,
                    state.rate.wz,
                    state.rate.ddot,
                    state.wheel_speeds[0],
                    state.wheel_speeds[1],
                    state.wheel_speeds[2],
                    state.wheel_speeds[3],
                    segment.rates.vx + balance_corr,
                    segment.rates.vy,
                    steer,
                    d_rate_cmd,
                )
            )
    return log


def compute_metrics(log: TrajectoryLog) -> RunMetrics:
    """Extract the deviation metrics; the start is the first row's pose."""
    log.require_rows()
    xs = log.column("x")
    ys = log.column("y")
    phis = log.column("phi")
    x0, y0 = xs[0], ys[0]

    endpoint = math.hypot(xs[-1] - x0, ys[-1] - y0)
    heading = abs(wrap_angle(phis[-1] - phis[0]))

    path = 0.0
    for i in range(1, len(xs)):
        path += math.hypot(xs[i] - xs[i - 1], ys[i] - ys[i - 1])

    tail_start = (3 * len(xs)) // 4
    loop = min(
        math.hypot(xs[i] - x0, ys[i] - y0) for i in range(tail_start, len(xs))
    )
    return RunMetrics(
        endpoint_deviation=endpoint,
        loop_deviation=loop,
        heading_drift=heading,
        path_length=path,
    )
