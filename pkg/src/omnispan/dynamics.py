"""Planar dynamics of the two-group variable-span platform.

The platform is modeled as two point masses (the wheel groups) on the
body y axis, a spacing d apart, with the body origin at their midpoint.
Because the spacing is a degree of freedom, the yaw inertia grows with
the square of d and extra rate-coupling ("pseudo") forces appear whenever
the platform spins while translating or while changing its span.

Sign conventions follow :mod:`omnispan.drive`; forces are body-frame
resultants per wheel group, in Newtons.  The centrifugal terms are stored
in their algebraically expanded form ``m * (vx*wz -/+ wz^2 * d/2)`` so
they stay finite (identically zero, in fact) at wz = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .drive import BodyRates
from .errors import NonPositiveMass, NonPositiveSpacing


@dataclass(frozen=True)
class MassPair:
    """Masses of the left and right wheel groups, kg."""

    m_left: float
    m_right: float

    def __post_init__(self) -> None:
        if not (self.m_left > 0.0 and self.m_right > 0.0):
            raise NonPositiveMass(
                f"group masses must be > 0, got ({self.m_left}, {self.m_right})"
            )

    @property
    def m_total(self) -> float:
        return self.m_left + self.m_right


@dataclass(frozen=True)
class DynState:
    """Rate vector plus current spacing -- the state the dynamics maps act on."""

    rate: BodyRates
    d: float

    def __post_init__(self) -> None:
        if not self.d > 0.0:
            raise NonPositiveSpacing(f"spacing must be > 0, got {self.d}")


class WheelGroupForces(NamedTuple):
    """Body-frame resultant forces applied at the two wheel groups, N."""

    fx_left: float
    fy_left: float
    fx_right: float
    fy_right: float


class PseudoForces(NamedTuple):
    """Coriolis and centrifugal terms per wheel group, N.

    All four vanish exactly when the yaw rate is zero.
    """

    coriolis_left: float
    coriolis_right: float
    centrifugal_left: float
    centrifugal_right: float


class BodyAccel(NamedTuple):
    """Body-frame accelerations: linear (m/s^2), yaw (rad/s^2), span (m/s^2)."""

    x_ddot: float
    y_ddot: float
    phi_ddot: float
    d_ddot: float


def center_of_mass_offset(masses: MassPair, d: float) -> float:
    """Signed offset of the center of mass from the group midpoint, m.

    y_c = (m_left - m_right) * d / (2 m); zero for a balanced build,
    antisymmetric under swapping the group masses.
    """
    if not d > 0.0:
        raise NonPositiveSpacing(f"spacing must be > 0, got {d}")
    return (masses.m_left - masses.m_right) * d / (2.0 * masses.m_total)


def moment_of_inertia(masses: MassPair, d: float) -> float:
    """Yaw moment of inertia about the center of mass, kg m^2.

    I = m_left * m_right * d^2 / m -- the two-point-mass result, growing
    with the square of the spacing.
    """
    if not d > 0.0:
        raise NonPositiveSpacing(f"spacing must be > 0, got {d}")
    return masses.m_left * masses.m_right * d * d / masses.m_total


def pseudo_forces(masses: MassPair, state: DynState) -> PseudoForces:
    """Coriolis and centrifugal force terms for the current state.

    coriolis_left   = m_L * wz * (2 vy - ddot)
    coriolis_right  = m_R * wz * (2 vy + ddot)
    centrifugal_left  = m_L * (vx wz - wz^2 d / 2)
    centrifugal_right = m_R * (vx wz + wz^2 d / 2)
    """
    vx, vy, wz, ddot = state.rate
    half_d = state.d / 2.0
    return PseudoForces(
        coriolis_left=masses.m_left * wz * (2.0 * vy - ddot),
        coriolis_right=masses.m_right * wz * (2.0 * vy + ddot),
        centrifugal_left=masses.m_left * (vx * wz - wz * wz * half_d),
        centrifugal_right=masses.m_right * (vx * wz + wz * wz * half_d),
    )


def forward_dynamics(
    masses: MassPair, state: DynState, forces: WheelGroupForces
) -> BodyAccel:
    """Accelerations produced by the given group forces at the given state."""
    m = masses.m_total
    inertia = moment_of_inertia(masses, state.d)
    pf = pseudo_forces(masses, state)
    fx_l = forces.fx_left - pf.coriolis_left
    fx_r = forces.fx_right + pf.coriolis_right
    fy_l = forces.fy_left - pf.centrifugal_left
    fy_r = forces.fy_right - pf.centrifugal_right
    return BodyAccel(
        x_ddot=(fx_l + fx_r) / m,
        y_ddot=(fy_l + fy_r) / m,
        phi_ddot=(fx_r * masses.m_left - fx_l * masses.m_right) * state.d / (m * inertia),
        d_ddot=fy_r / masses.m_right - fy_l / masses.m_left,
    )


def inverse_dynamics(
    masses: MassPair, state: DynState, accel: BodyAccel
) -> WheelGroupForces:
    """Group forces required to realize the given accelerations.

    Exact inverse of :func:`forward_dynamics` at the same state.
    """
    m = masses.m_total
    inertia = moment_of_inertia(masses, state.d)
    pf = pseudo_forces(masses, state)
    spin_torque_share = inertia * accel.phi_ddot / state.d
    span_share = masses.m_left * masses.m_right * accel.d_ddot / m
    return WheelGroupForces(
        fx_left=masses.m_left * accel.x_ddot - spin_torque_share + pf.coriolis_left,
        fy_left=masses.m_left * accel.y_ddot - span_share + pf.centrifugal_left,
        fx_right=masses.m_right * accel.x_ddot + spin_torque_share - pf.coriolis_right,
        fy_right=masses.m_right * accel.y_ddot + span_share + pf.centrifugal_right,
    )
