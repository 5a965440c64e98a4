"""Drive-model kinematics: worked examples, inverses, degeneracies."""

import math

import numpy as np
import pytest

from omnispan.drive import (
    BodyRates,
    BodyTwist,
    GroupRates,
    WheelPair,
    dd_forward,
    dd_inverse,
    od_forward,
    od_inverse,
    span_forward,
    span_inverse,
    wrap_angle,
)
from omnispan.errors import NonPositiveSpacing, SlipInconsistency


def test_dd_forward_examples():
    assert dd_forward(WheelPair(1.0, 1.0), 0.5) == (1.0, 0.0)
    assert dd_forward(WheelPair(-1.0, 1.0), 2.0) == (0.0, 1.0)
    assert dd_forward(WheelPair(0.0, 1.0), 1.0) == (0.5, 1.0)


def test_dd_inverse_examples():
    assert dd_inverse(1.0, 0.0, 0.5) == WheelPair(1.0, 1.0)
    assert dd_inverse(0.0, 1.0, 2.0) == WheelPair(-1.0, 1.0)
    assert dd_inverse(0.5, 1.0, 1.0) == WheelPair(0.0, 1.0)


def test_dd_roundtrip_exact():
    rng = np.random.default_rng(11)
    for _ in range(200):
        vx, wz = rng.normal(0, 2, 2)
        d = rng.uniform(0.05, 3.0)
        back = dd_forward(dd_inverse(vx, wz, d), d)
        assert back[0] == pytest.approx(vx, abs=1e-12)
        assert back[1] == pytest.approx(wz, abs=1e-12)


def test_od_forward_examples():
    assert od_forward(GroupRates(1, 0, 1, 0), 0.5) == BodyTwist(1.0, 0.0, 0.0)
    assert od_forward(GroupRates(0, 1, 0, 1), 0.5) == BodyTwist(0.0, 1.0, 0.0)


def test_od_forward_rejects_lateral_mismatch():
    """Unequal lateral group speeds at fixed spacing mean slip."""
    with pytest.raises(SlipInconsistency):
        od_forward(GroupRates(0, 1, 0, -1), 0.5)


def test_od_inverse_examples():
    assert od_inverse(BodyTwist(1, 0, 0), 1.0) == GroupRates(1.0, 0.0, 1.0, 0.0)
    assert od_inverse(BodyTwist(0, 0, 1), 2.0) == GroupRates(-1.0, 0.0, 1.0, 0.0)
    assert od_inverse(BodyTwist(1, 1, 0), 0.4) == GroupRates(1.0, 1.0, 1.0, 1.0)


def test_span_forward_examples():
    assert span_forward(GroupRates(1, 0, 1, 0), 0.5) == BodyRates(1.0, 0.0, 0.0, 0.0)
    assert span_forward(GroupRates(0, 1, 0, -1), 0.5) == BodyRates(0.0, 0.0, 0.0, 2.0)
    assert span_forward(GroupRates(-1, 0, 1, 0), 2.0) == BodyRates(0.0, 0.0, 1.0, 0.0)


def test_span_inverse_examples():
    assert span_inverse(BodyRates(1, 0, 0, 0), 0.5) == GroupRates(1.0, 0.0, 1.0, 0.0)
    assert span_inverse(BodyRates(0, 0, 0, 2), 0.5) == GroupRates(0.0, 1.0, 0.0, -1.0)
    assert span_inverse(BodyRates(0, 1, 1, 0), 1.0) == GroupRates(-0.5, 1.0, 0.5, 1.0)


def _span_forward_matrix(d):
    basis = np.eye(4)
    return np.column_stack([span_forward(GroupRates(*col), d) for col in basis])


def _span_inverse_matrix(d):
    basis = np.eye(4)
    return np.column_stack([span_inverse(BodyRates(*col), d) for col in basis])


def test_span_matrices_are_mutual_inverses():
    """Forward times inverse deviates from identity by < 1e-12 per entry."""
    rng = np.random.default_rng(7)
    for _ in range(1000):
        d = rng.uniform(1e-6, 10.0)
        product = _span_forward_matrix(d) @ _span_inverse_matrix(d)
        assert np.abs(product - np.eye(4)).max() < 1e-12


def test_span_roundtrip_randomized():
    rng = np.random.default_rng(8)
    for _ in range(1000):
        rates = BodyRates(*rng.normal(0, 3, 4))
        d = rng.uniform(0.01, 10.0)
        back = span_forward(span_inverse(rates, d), d)
        assert max(abs(a - b) for a, b in zip(back, rates)) < 1e-12


def test_span_degenerates_to_od_and_dd():
    """With equal lateral speeds the span map is the fixed-spacing omni map;
    with zero lateral speeds it is the differential drive."""
    rng = np.random.default_rng(9)
    for _ in range(200):
        vx_l, vy, vx_r = rng.normal(0, 2, 3)
        d = rng.uniform(0.05, 4.0)
        full = span_forward(GroupRates(vx_l, vy, vx_r, vy), d)
        twist = od_forward(GroupRates(vx_l, vy, vx_r, vy), d)
        assert (full.vx, full.vy, full.wz) == twist
        assert full.ddot == 0.0

        straight = span_forward(GroupRates(vx_l, 0.0, vx_r, 0.0), d)
        vx, wz = dd_forward(WheelPair(vx_l, vx_r), d)
        assert (straight.vx, straight.wz) == (vx, wz)


def test_span_maps_are_linear():
    """Superposition holds to machine precision for fixed spacing."""
    rng = np.random.default_rng(10)
    for _ in range(100):
        d = rng.uniform(0.05, 5.0)
        a = GroupRates(*rng.normal(0, 2, 4))
        b = GroupRates(*rng.normal(0, 2, 4))
        s = rng.normal()
        combined = span_forward(GroupRates(*(ai * s + bi for ai, bi in zip(a, b))), d)
        parts = [
            s * fa + fb
            for fa, fb in zip(span_forward(a, d), span_forward(b, d))
        ]
        assert max(abs(c - p) for c, p in zip(combined, parts)) < 1e-9


def test_nonpositive_spacing_rejected():
    for d in (0.0, -0.1):
        with pytest.raises(NonPositiveSpacing):
            dd_forward(WheelPair(1, 1), d)
        with pytest.raises(NonPositiveSpacing):
            od_inverse(BodyTwist(1, 0, 0), d)
        with pytest.raises(NonPositiveSpacing):
            span_forward(GroupRates(1, 0, 1, 0), d)
        with pytest.raises(NonPositiveSpacing):
            span_inverse(BodyRates(1, 0, 0, 0), d)


def test_wrap_angle_range():
    for angle in (-10.0, -math.pi, 0.0, math.pi, 3.5, 100.0):
        wrapped = wrap_angle(angle)
        assert -math.pi < wrapped <= math.pi
        # same direction modulo full turns
        assert abs(math.remainder(wrapped - angle, math.tau)) < 1e-9
