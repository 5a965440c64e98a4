"""Wheel-level kinematics of the four collinear Mecanum wheels.

The rig carries four Mecanum wheels on a single axle line, numbered 1..4
from left to right.  Wheels 1-2 form the left group, 3-4 the right group;
passive slides keep the two groups collinear while letting the group
spacing d vary.  Within a group the two wheel contact points sit a fixed
distance w apart, symmetric about the group center.

Each wheel constrains one scalar: with roller angle ``alpha_i`` measured
from the body x axis (T_i, C_i, S_i its tan/cos/sin), the drive speed of
wheel i satisfies

    r * th_i * C_i = C_i * vx_i + S_i * vy_i

where (vx_i, vy_i) is the body-frame velocity of that wheel's contact
point.  Expressing the contact-point velocities through the group speeds
(single yaw rate wz, spacing rate folded into the lateral speeds) gives a
4x4 linear system between wheel speeds and group speeds.  Its closed-form
inverse is expressed with five geometry scalars sigma1..sigma5; sigma1 is
the determinant-like factor whose zero marks the kinematic singularity.

The default roller pattern alternates (-45, +45, +45, -45) degrees, for
which sigma1 = -4 d: non-singular across the whole spacing range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .drive import BodyRates, GroupRates, span_forward, span_inverse
from .errors import (
    DegenerateRoller,
    NonPositiveSpacing,
    SingularConfiguration,
    SpacingOutOfRange,
)

#: |sigma1| below this is treated as a singular configuration.
SINGULAR_EPS = 1e-6

#: |cos(alpha_i)| below this means the wheel cannot transmit drive at all.
ROLLER_EPS = 1e-9


class WheelSpeeds(NamedTuple):
    """Angular velocities of wheels 1..4 (left to right), rad/s."""

    th1: float
    th2: float
    th3: float
    th4: float


class SigmaTerms(NamedTuple):
    """Geometry scalars of the closed-form wheel-to-group inverse."""

    sigma1: float
    sigma2: float
    sigma3: float
    sigma4: float
    sigma5: float


@dataclass(frozen=True)
class RigGeometry:
    """Fixed geometry of the four-wheel rig.

    r      wheel radius, m
    w      contact spacing of the two wheels inside a group, m
    alpha  roller angles alpha_1..alpha_4, rad
    d_min, d_max  mechanical limits of the group spacing, m
    """

    r: float = 0.05
    w: float = 0.2
    alpha: tuple[float, float, float, float] = (
        -math.pi / 4.0,
        math.pi / 4.0,
        math.pi / 4.0,
        -math.pi / 4.0,
    )
    d_min: float = 0.25
    d_max: float = 0.8

    def __post_init__(self) -> None:
        if not self.r > 0.0:
            raise ValueError(f"wheel radius must be > 0, got {self.r}")
        if not self.w > 0.0:
            raise ValueError(f"intra-group spacing must be > 0, got {self.w}")
        if len(self.alpha) != 4:
            raise ValueError("exactly four roller angles required")
        for i, a in enumerate(self.alpha, start=1):
            if abs(math.cos(a)) <= ROLLER_EPS:
                raise DegenerateRoller(f"roller angle {i} too close to 90 degrees")
        if not 0.0 < self.d_min <= self.d_max:
            raise ValueError(
                f"need 0 < d_min <= d_max, got [{self.d_min}, {self.d_max}]"
            )

    @property
    def tangents(self) -> tuple[float, float, float, float]:
        a1, a2, a3, a4 = self.alpha
        return (math.tan(a1), math.tan(a2), math.tan(a3), math.tan(a4))

    def check_spacing(self, d: float) -> None:
        if not self.d_min <= d <= self.d_max:
            raise SpacingOutOfRange(
                f"spacing {d} outside [{self.d_min}, {self.d_max}]"
            )


def sigma_terms(geom: RigGeometry, d: float) -> SigmaTerms:
    """Evaluate the five geometry scalars at spacing d."""
    if not d > 0.0:
        raise NonPositiveSpacing(f"spacing must be > 0, got {d}")
    t1, t2, t3, t4 = geom.tangents
    w = geom.w
    return SigmaTerms(
        sigma1=t1 * t3 * d - t1 * t4 * (d - w) - t2 * t3 * (d + w) + t2 * t4 * d,
        sigma2=2.0 * d + w,
        sigma3=2.0 * d - w,
        sigma4=d - w,
        sigma5=d + w,
    )


def singularity_metric(geom: RigGeometry, d: float) -> float:
    """sigma1 at spacing d; |sigma1| < SINGULAR_EPS means singular."""
    return sigma_terms(geom, d).sigma1


def wheel_matrix(geom: RigGeometry, d: float) -> tuple[tuple[float, ...], ...]:
    """4x4 map from group speeds (vxL, vyL, vxR, vyR) to wheel speeds.

    Assembled from the per-wheel rolling constraints with the single yaw
    rate wz = (vxR - vxL)/d substituted, so the collinear coupling between
    the groups is built in.  Rows are already divided by r*C_i.
    """
    if not d > 0.0:
        raise NonPositiveSpacing(f"spacing must be > 0, got {d}")
    t1, t2, t3, t4 = geom.tangents
    r = geom.r
    lever = geom.w / (2.0 * d)
    return (
        ((1.0 + lever) / r, t1 / r, -lever / r, 0.0),
        ((1.0 - lever) / r, t2 / r, lever / r, 0.0),
        (lever / r, 0.0, (1.0 - lever) / r, t3 / r),
        (-lever / r, 0.0, (1.0 + lever) / r, t4 / r),
    )


def group_matrix(geom: RigGeometry, d: float) -> tuple[tuple[float, ...], ...]:
    """4x4 closed-form map from wheel speeds to group speeds.

    Symbolic inverse of :func:`wheel_matrix`, expressed with the sigma
    scalars and prefactor r / (2 sigma1).
    """
    t1, t2, t3, t4 = geom.tangents
    s = sigma_terms(geom, d)
    w = geom.w
    k = geom.r / (2.0 * s.sigma1)
    return (
        (
            k * (-t2 * t3 * s.sigma2 + t2 * t4 * s.sigma3),
            k * (t1 * t3 * s.sigma2 - t1 * t4 * s.sigma3),
            k * (t4 * t1 * w + t4 * t2 * w),
            k * (-t3 * t1 * w - t3 * t2 * w),
        ),
        (
            k * 2.0 * (t3 * d - t4 * s.sigma4),
            k * -2.0 * (t3 * s.sigma5 - t4 * d),
            k * -2.0 * t4 * w,
            k * 2.0 * t3 * w,
        ),
        (
            k * (-t2 * t3 * w - t2 * t4 * w),
            k * (t1 * t3 * w + t1 * t4 * w),
            k * (-t4 * t1 * s.sigma3 + t4 * t2 * s.sigma2),
            k * (t3 * t1 * s.sigma3 - t3 * t2 * s.sigma2),
        ),
        (
            k * 2.0 * t2 * w,
            k * -2.0 * t1 * w,
            k * 2.0 * (t1 * d - t2 * s.sigma5),
            k * -2.0 * (t1 * s.sigma4 - t2 * d),
        ),
    )


def rates_matrix(geom: RigGeometry, d: float) -> tuple[tuple[float, ...], ...]:
    """4x4 closed-form map from wheel speeds straight to body rates."""
    t1, t2, t3, t4 = geom.tangents
    s = sigma_terms(geom, d)
    w = geom.w
    k = geom.r / (2.0 * s.sigma1)
    return (
        (
            k * (-t2 * t3 * s.sigma5 + t2 * t4 * s.sigma4),
            k * (t1 * t3 * s.sigma5 - t1 * t4 * s.sigma4),
            k * (-t4 * t1 * s.sigma4 + t4 * t2 * s.sigma5),
            k * (t3 * t1 * s.sigma4 - t3 * t2 * s.sigma5),
        ),
        (
            k * (t2 * w + t3 * d - t4 * s.sigma4),
            k * (-t1 * w - t3 * s.sigma5 + t4 * d),
            k * (t1 * d - t2 * s.sigma5 - t4 * w),
            k * (-t1 * s.sigma4 + t2 * d + t3 * w),
        ),
        (
            k * 2.0 * t2 * (t3 - t4),
            k * 2.0 * t1 * (-t3 + t4),
            k * 2.0 * t4 * (-t1 + t2),
            k * 2.0 * t3 * (t1 - t2),
        ),
        (
            k * 2.0 * (-t2 * w + t3 * d - t4 * s.sigma4),
            k * 2.0 * (t1 * w - t3 * s.sigma5 + t4 * d),
            k * 2.0 * (-t1 * d + t2 * s.sigma5 - t4 * w),
            k * 2.0 * (t1 * s.sigma4 - t2 * d + t3 * w),
        ),
    )


def _check_nonsingular(geom: RigGeometry, d: float) -> None:
    if abs(singularity_metric(geom, d)) < SINGULAR_EPS:
        raise SingularConfiguration(
            f"roller pattern is singular at spacing {d} (|sigma1| < {SINGULAR_EPS})"
        )


def inverse_kinematics(geom: RigGeometry, d: float, rates: BodyRates) -> WheelSpeeds:
    """Wheel speeds realizing the given body rates at spacing d.

    Splits the body rates into group speeds, then applies each wheel's
    rolling constraint with the shared yaw rate.
    """
    geom.check_spacing(d)
    for i, a in enumerate(geom.alpha, start=1):
        if abs(math.cos(a)) <= ROLLER_EPS:
            raise DegenerateRoller(f"roller angle {i} too close to 90 degrees")
    g = span_inverse(rates, d)
    t1, t2, t3, t4 = geom.tangents
    r = geom.r
    half_w_wz = geom.w * rates.wz / 2.0
    return WheelSpeeds(
        (g.vx_left + t1 * g.vy_left - half_w_wz) / r,
        (g.vx_left + t2 * g.vy_left + half_w_wz) / r,
        (g.vx_right + t3 * g.vy_right - half_w_wz) / r,
        (g.vx_right + t4 * g.vy_right + half_w_wz) / r,
    )


def group_velocities_from_wheels(
    geom: RigGeometry, d: float, wheels: WheelSpeeds
) -> GroupRates:
    """Group speeds recovered from wheel speeds via the closed-form inverse."""
    _check_nonsingular(geom, d)
    m = group_matrix(geom, d)
    return GroupRates(
        m[0][0] * wheels.th1 + m[0][1] * wheels.th2 + m[0][2] * wheels.th3 + m[0][3] * wheels.th4,
        m[1][0] * wheels.th1 + m[1][1] * wheels.th2 + m[1][2] * wheels.th3 + m[1][3] * wheels.th4,
        m[2][0] * wheels.th1 + m[2][1] * wheels.th2 + m[2][2] * wheels.th3 + m[2][3] * wheels.th4,
        m[3][0] * wheels.th1 + m[3][1] * wheels.th2 + m[3][2] * wheels.th3 + m[3][3] * wheels.th4,
    )


def forward_kinematics(geom: RigGeometry, d: float, wheels: WheelSpeeds) -> BodyRates:
    """Body rates produced by the given wheel speeds at spacing d."""
    _check_nonsingular(geom, d)
    m = rates_matrix(geom, d)
    return BodyRates(
        m[0][0] * wheels.th1 + m[0][1] * wheels.th2 + m[0][2] * wheels.th3 + m[0][3] * wheels.th4,
        m[1][0] * wheels.th1 + m[1][1] * wheels.th2 + m[1][2] * wheels.th3 + m[1][3] * wheels.th4,
        m[2][0] * wheels.th1 + m[2][1] * wheels.th2 + m[2][2] * wheels.th3 + m[2][3] * wheels.th4,
        m[3][0] * wheels.th1 + m[3][1] * wheels.th2 + m[3][2] * wheels.th3 + m[3][3] * wheels.th4,
    )


def group_velocities_oracle(
    geom: RigGeometry, d: float, wheels: WheelSpeeds
) -> GroupRates:
    """Independent check of the closed-form inverse: numerically invert the
    assembled wheel constraint system."""
    import numpy as np

    if not d > 0.0:
        raise NonPositiveSpacing(f"spacing must be > 0, got {d}")
    a = np.array(wheel_matrix(geom, d))
    try:
        g = np.linalg.solve(a, np.array(wheels))
    except np.linalg.LinAlgError as exc:
        raise SingularConfiguration("assembled wheel system is singular") from exc
    return GroupRates(*(float(v) for v in g))


def body_rates_oracle(geom: RigGeometry, d: float, wheels: WheelSpeeds) -> BodyRates:
    """Independent forward map: numeric inverse composed with the span map."""
    return span_forward(group_velocities_oracle(geom, d, wheels), d)
