"""Flat key-value config files."""

import math

import pytest

from omnispan.config import config_from_mapping, load_config
from omnispan.errors import ConfigError, IoFailure
from omnispan.sim import SimConfig


def test_empty_mapping_gives_defaults():
    assert config_from_mapping({}) == SimConfig()


def test_load_full_file(tmp_path):
    path = tmp_path / "bench.yaml"
    path.write_text(
        "\n".join(
            [
                "dt: 0.001",
                "mode: balance",
                "seed: 7",
                "d_initial: 0.3",
                "wheel_radius: 0.06",
                "wheel_pair_gap: 0.18",
                "roller_angles_deg: [-45, 45, 45, -45]",
                "d_min: 0.2",
                "d_max: 0.9",
                "mass_left: 2.2",
                "mass_right: 1.8",
                "com_height: 0.25",
                "ground_incline_x: 0.0087",
                "noise_draw_wire_rel: 0.001",
                "wheel_speed_tracking_tau: 0.02",
                "balance_pitch_kp: 3.0",
                "k_pf: 1.5",
                "limit_vx: 0.8",
            ]
        )
    )
    config = load_config(path)
    assert config.dt == 0.001
    assert config.mode == "balance"
    assert config.seed == 7
    assert config.geometry.r == 0.06
    assert config.geometry.w == 0.18
    assert config.geometry.alpha[0] == pytest.approx(-math.pi / 4.0)
    assert config.geometry.d_min == 0.2
    assert config.masses.m_left == 2.2
    assert config.ground_incline == (0.0087, 0.0)
    assert config.sensor_noise.draw_wire_rel == 0.001
    assert config.wheel_speed_tracking_tau == 0.02
    assert config.gains.balance_pitch.kp == 3.0
    assert config.gains.k_pf == 1.5
    assert config.command_limits[0] == 0.8


def test_partial_gain_override_keeps_other_fields():
    config = config_from_mapping({"distance_inner_ki": 12.0})
    defaults = SimConfig()
    assert config.gains.distance_inner.ki == 12.0
    assert config.gains.distance_inner.kp == defaults.gains.distance_inner.kp
    assert config.gains.distance_outer == defaults.gains.distance_outer


def test_unknown_key_rejected():
    with pytest.raises(ConfigError):
        config_from_mapping({"wheel_radius": 0.05, "wheelradius": 0.06})


def test_non_mapping_rejected():
    with pytest.raises(ConfigError):
        config_from_mapping(["dt", 0.005])


def test_bad_values_surface_as_config_errors():
    with pytest.raises(ConfigError):
        config_from_mapping({"dt": -1.0})
    with pytest.raises(ConfigError):
        config_from_mapping({"mode": "hover"})
    with pytest.raises(ConfigError):
        config_from_mapping({"roller_angles_deg": [45, 45]})
    with pytest.raises(ConfigError):
        config_from_mapping({"dt": "fast"})


def test_missing_file_raises_io_failure(tmp_path):
    with pytest.raises(IoFailure):
        load_config(tmp_path / "nope.yaml")


def test_invalid_yaml_raises_config_error(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("dt: [unclosed\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_empty_file_means_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    assert load_config(path) == SimConfig()
