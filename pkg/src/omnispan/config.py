"""Flat key-value config files.

The on-disk form is a flat YAML mapping (one scalar per key, lists only
for the four roller angles), documented key by key in the README.  Any
key may be omitted; omissions take the shipped defaults.  Unknown keys
are an error so typos do not silently fall back to defaults.
"""

from __future__ import annotations

import math
import os

import yaml

from .control import PidGains, SuiteGains
from .dynamics import MassPair
from .errors import ConfigError, IoFailure
from .mecanum import RigGeometry
from .sim import SensorNoise, SimConfig

# key -> (section, field); sections are assembled into the nested config.
_GEOMETRY_KEYS = {
    "wheel_radius": "r",
    "wheel_pair_gap": "w",
    "d_min": "d_min",
    "d_max": "d_max",
}
_NOISE_KEYS = {
    "noise_draw_wire_rel": "draw_wire_rel",
    "noise_d_rate": "d_rate",
    "noise_imu_angle": "imu_angle",
    "noise_imu_rate": "imu_rate",
    "noise_encoder_quantum": "encoder_quantum",
    "noise_accel": "accel",
}
_TOP_KEYS = {
    "dt": "dt",
    "mode": "mode",
    "seed": "seed",
    "d_initial": "d_initial",
    "com_height": "com_height",
    "wheel_speed_tracking_tau": "wheel_speed_tracking_tau",
    "plant": "plant",
    "force_servo_gain": "force_servo_gain",
    "incline_slip_gain": "incline_slip_gain",
    "asym_yaw_gain": "asym_yaw_gain",
    "stiction_threshold": "stiction_threshold",
}
_GAIN_LOOPS = {
    "balance_pitch": "balance_pitch",
    "balance_velocity": "balance_velocity",
    "steering": "steering",
    "distance_outer": "distance_outer",
    "distance_inner": "distance_inner",
    "motor": "motor",
}
_GAIN_FIELDS = ("kp", "ki", "kd", "output_min", "output_max", "integral_limit")


def _known_keys() -> set[str]:
    keys = set(_TOP_KEYS) | set(_GEOMETRY_KEYS) | set(_NOISE_KEYS)
    keys |= {
        "roller_angles_deg",
        "mass_left",
        "mass_right",
        "ground_incline_x",
        "ground_incline_y",
        "limit_vx",
        "limit_vy",
        "limit_wz",
        "limit_ddot",
        "k_pf",
    }
    for loop in _GAIN_LOOPS:
        for fld in _GAIN_FIELDS:
            keys.add(f"{loop}_{fld}")
    return keys


_KNOWN = _known_keys()


def config_from_mapping(raw: dict) -> SimConfig:
    """Build a SimConfig from a flat mapping; unknown keys raise."""
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a flat mapping")
    unknown = set(raw) - _KNOWN
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    defaults = SimConfig()

    geom_kwargs = {
        field: float(raw[key]) for key, field in _GEOMETRY_KEYS.items() if key in raw
    }
    if "roller_angles_deg" in raw:
        angles = raw["roller_angles_deg"]
        if not isinstance(angles, (list, tuple)) or len(angles) != 4:
            raise ConfigError("roller_angles_deg must be a list of four angles")
        geom_kwargs["alpha"] = tuple(math.radians(float(a)) for a in angles)
    geometry = RigGeometry(**geom_kwargs) if geom_kwargs else defaults.geometry

    masses = MassPair(
        float(raw.get("mass_left", defaults.masses.m_left)),
        float(raw.get("mass_right", defaults.masses.m_right)),
    )

    noise_kwargs = {
        field: float(raw[key]) for key, field in _NOISE_KEYS.items() if key in raw
    }
    noise = SensorNoise(**noise_kwargs) if noise_kwargs else defaults.sensor_noise

    gain_kwargs = {}
    base_gains = SuiteGains()
    for loop, attr in _GAIN_LOOPS.items():
        loop_kwargs = {}
        for fld in _GAIN_FIELDS:
            key = f"{loop}_{fld}"
            if key in raw:
                loop_kwargs[fld] = float(raw[key])
        if loop_kwargs:
            base = getattr(base_gains, attr)
            merged = {f: getattr(base, f) for f in _GAIN_FIELDS}
            merged.update(loop_kwargs)
            gain_kwargs[attr] = PidGains(**merged)
    if "k_pf" in raw:
        gain_kwargs["k_pf"] = float(raw["k_pf"])
    gains = SuiteGains(**gain_kwargs) if gain_kwargs else base_gains

    top_kwargs = {}
    for key, fld in _TOP_KEYS.items():
        if key in raw:
            value = raw[key]
            top_kwargs[fld] = value if fld in ("mode", "plant") else _coerce(key, value)
    if "seed" in top_kwargs:
        top_kwargs["seed"] = int(raw["seed"])

    incline = (
        float(raw.get("ground_incline_x", defaults.ground_incline[0])),
        float(raw.get("ground_incline_y", defaults.ground_incline[1])),
    )
    limits = (
        float(raw.get("limit_vx", defaults.command_limits[0])),
        float(raw.get("limit_vy", defaults.command_limits[1])),
        float(raw.get("limit_wz", defaults.command_limits[2])),
        float(raw.get("limit_ddot", defaults.command_limits[3])),
    )

    try:
        return SimConfig(
            geometry=geometry,
            masses=masses,
            sensor_noise=noise,
            gains=gains,
            ground_incline=incline,
            command_limits=limits,
            **top_kwargs,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _coerce(key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config key {key} must be a number, got {value!r}")
    return float(value)


def load_config(path: str | os.PathLike) -> SimConfig:
    """Load a config file; a missing or empty file means all defaults."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = yaml.safe_load(handle)
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    return config_from_mapping(raw or {})
