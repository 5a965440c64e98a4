"""Closed-form kinematics of the three planar drive models.

Three drive models are covered, all expressed in the body frame B whose
origin sits at the midpoint between the two wheel groups:

* differential drive (``dd_*``): two conventional wheels a fixed distance
  d apart; controls forward speed and yaw rate only.
* omnidirectional drive (``od_*``): two omnidirectional wheel groups at a
  fixed spacing d; controls the full planar twist but is over-actuated --
  the two lateral speeds must agree or the wheels slip.
* variable-span drive (``span_*``): the same two omni groups with the
  spacing d free to change; the lateral speed *difference* becomes the
  spacing rate ``ddot`` and the system is fully actuated.

Conventions:
    vx, vy     body-frame linear speeds, m/s (x forward, y along the axle line)
    wz         yaw rate, rad/s, positive counter-clockwise
    d, ddot    wheel-group spacing (m) and its rate (m/s)
    left/right wheel groups as seen from behind the robot, i.e. the left
               group is the one whose forward speed drops during a positive
               (counter-clockwise) spin

All maps are linear in the rate arguments for a fixed spacing, stateless,
and safe to call concurrently.
"""

from __future__ import annotations

import math
from typing import NamedTuple

from .errors import NonPositiveSpacing, SlipInconsistency

#: Largest tolerated |vy_left - vy_right| for the fixed-spacing omni drive.
DEFAULT_SLIP_TOLERANCE = 1e-9


class WheelPair(NamedTuple):
    """Linear speeds of the two wheels of a differential drive, m/s."""

    left: float
    right: float


class GroupRates(NamedTuple):
    """Body-frame linear speeds of the two wheel groups, m/s."""

    vx_left: float
    vy_left: float
    vx_right: float
    vy_right: float


class BodyTwist(NamedTuple):
    """Planar body twist: linear speeds (m/s) and yaw rate (rad/s)."""

    vx: float
    vy: float
    wz: float


class BodyRates(NamedTuple):
    """Body twist plus the spacing rate -- the full rate vector of the
    variable-span drive."""

    vx: float
    vy: float
    wz: float
    ddot: float


def _check_spacing(d: float) -> None:
    if not d > 0.0:
        raise NonPositiveSpacing(f"spacing must be > 0, got {d}")


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, math.tau)
    if wrapped <= -math.pi:
        wrapped += math.tau
    return wrapped


def clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


def dd_forward(wheels: WheelPair, d: float) -> tuple[float, float]:
    """Differential drive, wheel speeds to (vx, wz)."""
    _check_spacing(d)
    vx = (wheels.left + wheels.right) / 2.0
    wz = (wheels.right - wheels.left) / d
    return vx, wz


def dd_inverse(vx: float, wz: float, d: float) -> WheelPair:
    """Differential drive, (vx, wz) to wheel speeds; exact inverse of
    :func:`dd_forward`."""
    _check_spacing(d)
    half = d * wz / 2.0
    return WheelPair(vx - half, vx + half)


def od_forward(
    groups: GroupRates, d: float, slip_tolerance: float = DEFAULT_SLIP_TOLERANCE
) -> BodyTwist:
    """Fixed-spacing omni drive, group speeds to body twist.

    The fixed spacing makes the system over-actuated: the two lateral
    speeds must agree to within ``slip_tolerance`` or the commanded motion
    implies wheel slip and :class:`SlipInconsistency` is raised.
    """
    _check_spacing(d)
    if abs(groups.vy_left - groups.vy_right) > slip_tolerance:
        raise SlipInconsistency(
            "lateral group speeds differ by "
            f"{abs(groups.vy_left - groups.vy_right):g} m/s at fixed spacing"
        )
    vx = (groups.vx_left + groups.vx_right) / 2.0
    vy = (groups.vy_left + groups.vy_right) / 2.0
    wz = (groups.vx_right - groups.vx_left) / d
    return BodyTwist(vx, vy, wz)


def od_inverse(twist: BodyTwist, d: float) -> GroupRates:
    """Fixed-spacing omni drive, body twist to group speeds."""
    _check_spacing(d)
    half = d * twist.wz / 2.0
    return GroupRates(
        twist.vx - half,
        twist.vy,
        twist.vx + half,
        twist.vy,
    )


def span_forward(groups: GroupRates, d: float) -> BodyRates:
    """Variable-span drive, group speeds to body rates.

    Row for row:
        vx   = (vx_left + vx_right) / 2
        vy   = (vy_left + vy_right) / 2
        wz   = (vx_right - vx_left) / d
        ddot = vy_left - vy_right
    """
    _check_spacing(d)
    return BodyRates(
        (groups.vx_left + groups.vx_right) / 2.0,
        (groups.vy_left + groups.vy_right) / 2.0,
        (groups.vx_right - groups.vx_left) / d,
        groups.vy_left - groups.vy_right,
    )


def span_inverse(rates: BodyRates, d: float) -> GroupRates:
    """Variable-span drive, body rates to group speeds; exact inverse of
    :func:`span_forward` for every d > 0."""
    _check_spacing(d)
    half_spin = d * rates.wz / 2.0
    half_ddot = rates.ddot / 2.0
    return GroupRates(
        rates.vx - half_spin,
        rates.vy + half_ddot,
        rates.vx + half_spin,
        rates.vy - half_ddot,
    )
