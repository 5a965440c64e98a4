"""Acceptance criteria as runnable checks.

Each criterion is one function that raises :class:`CheckFailed` with a
diagnostic, or returns a detail string.  ``omnispan verify`` and the test
suite both execute this list, so the shipped package can re-verify itself
on any machine.
"""

from __future__ import annotations

import contextlib
import math
import os
import socket
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, replace

import numpy as np

from .control import ControllerSuite, PidGains, PidMemory, mix_commands, pid_step
from .drive import BodyRates, BodyTwist, GroupRates, span_forward, span_inverse
from .dynamics import (
    BodyAccel,
    DynState,
    MassPair,
    forward_dynamics,
    inverse_dynamics,
    moment_of_inertia,
    pseudo_forces,
)
from .mecanum import (
    RigGeometry,
    forward_kinematics,
    group_matrix,
    inverse_kinematics,
    rates_matrix,
    singularity_metric,
    wheel_matrix,
)
from .scripts import CommandScript, Segment, builtin_script, compute_metrics, run_script
from .sim import SimConfig, Simulator, make_initial_state
from .testclient import TeleopClient
from .trajlog import import_log


class CheckFailed(AssertionError):
    pass


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CheckFailed(message)


@dataclass
class CriterionResult:
    name: str
    passed: bool
    detail: str
    seconds: float


# ----------------------------------------------------------------------------
# closed-form kinematics


def check_matrix_identities() -> str:
    """Span forward x inverse = identity for 1000 random spacings."""
    start = time.monotonic()
    rng = np.random.default_rng(100)
    basis = np.eye(4)
    worst = 0.0
    for _ in range(1000):
        d = float(rng.uniform(1e-9, 10.0))
        forward = np.column_stack([span_forward(GroupRates(*col), d) for col in basis])
        inverse = np.column_stack([span_inverse(BodyRates(*col), d) for col in basis])
        worst = max(worst, float(np.abs(forward @ inverse - basis).max()))
    elapsed = time.monotonic() - start
    _require(worst < 1e-12, f"matrix identity error {worst:.2e} >= 1e-12")
    _require(elapsed < 1.0, f"matrix identity check took {elapsed:.2f}s >= 1s")
    return f"max |F*I - eye| = {worst:.2e} over 1000 spacings in {elapsed:.2f}s"


def _random_rig(rng) -> tuple[RigGeometry, float]:
    while True:
        geom = RigGeometry(
            r=float(rng.uniform(0.02, 0.15)),
            w=float(rng.uniform(0.05, 0.5)),
            alpha=tuple(rng.uniform(-1.2, 1.2, 4)),
            d_min=0.05,
            d_max=5.0,
        )
        d = float(rng.uniform(0.1, 3.0))
        if abs(singularity_metric(geom, d)) > 1e-3:
            return geom, d


def check_oracle_equivalence() -> str:
    """Closed-form wheel maps equal numeric inversion of the assembled system."""
    start = time.monotonic()
    rng = np.random.default_rng(101)
    span_rows = np.array([[0.5, 0, 0.5, 0], [0, 0.5, 0, 0.5], [0, 0, 0, 0], [0, 1, 0, -1]])
    worst = 0.0
    for _ in range(1000):
        geom, d = _random_rig(rng)
        numeric = np.linalg.inv(np.array(wheel_matrix(geom, d)))
        scale = max(float(np.abs(numeric).max()), 1.0)
        err13 = float(np.abs(np.array(group_matrix(geom, d)) - numeric).max()) / scale
        span = span_rows.copy()
        span[2] = [-1.0 / d, 0, 1.0 / d, 0]
        err14 = float(np.abs(np.array(rates_matrix(geom, d)) - span @ numeric).max()) / scale
        worst = max(worst, err13, err14)
    elapsed = time.monotonic() - start
    _require(worst < 1e-9, f"oracle equivalence error {worst:.2e} >= 1e-9")
    _require(elapsed < 5.0, f"oracle equivalence took {elapsed:.2f}s >= 5s")
    return f"max relative error {worst:.2e} over 1000 rigs in {elapsed:.2f}s"


def check_kinematic_roundtrips() -> str:
    """span and wheel-level forward(inverse(rates)) identities on 1000 draws."""
    rng = np.random.default_rng(102)
    worst_span = 0.0
    worst_rig = 0.0
    for _ in range(1000):
        rates = BodyRates(*rng.normal(0, 3, 4))
        d = float(rng.uniform(0.01, 10.0))
        back = span_forward(span_inverse(rates, d), d)
        worst_span = max(worst_span, max(abs(a - b) for a, b in zip(back, rates)))

        geom, d = _random_rig(rng)
        back = forward_kinematics(geom, d, inverse_kinematics(geom, d, rates))
        worst_rig = max(worst_rig, max(abs(a - b) for a, b in zip(back, rates)))
    _require(worst_span < 1e-9, f"span roundtrip error {worst_span:.2e} >= 1e-9")
    _require(worst_rig < 1e-9, f"wheel roundtrip error {worst_rig:.2e} >= 1e-9")
    return f"span {worst_span:.2e}, wheel-level {worst_rig:.2e} over 1000 draws"


def check_dynamics_roundtrip() -> str:
    """Force/acceleration maps invert; inertia matches the two-point oracle;
    pseudo-forces vanish exactly without spin."""
    rng = np.random.default_rng(103)
    worst_round = 0.0
    worst_inertia = 0.0
    for _ in range(1000):
        masses = MassPair(*rng.uniform(0.1, 8.0, 2))
        state = DynState(BodyRates(*rng.normal(0, 3, 4)), float(rng.uniform(0.05, 4.0)))
        accel = BodyAccel(*rng.normal(0, 5, 4))
        back = forward_dynamics(masses, state, inverse_dynamics(masses, state, accel))
        worst_round = max(worst_round, max(abs(a - b) for a, b in zip(back, accel)))

        y_l, y_r = -state.d / 2.0, state.d / 2.0
        y_c = (masses.m_left * y_l + masses.m_right * y_r) / masses.m_total
        oracle = masses.m_left * (y_c - y_l) ** 2 + masses.m_right * (y_c - y_r) ** 2
        worst_inertia = max(
            worst_inertia, abs(moment_of_inertia(masses, state.d) - oracle)
        )

        still = DynState(BodyRates(rng.normal(), rng.normal(), 0.0, rng.normal()), state.d)
        _require(
            pseudo_forces(masses, still) == (0.0, 0.0, 0.0, 0.0),
            "pseudo-forces nonzero at zero spin",
        )
    _require(worst_round < 1e-9, f"dynamics roundtrip error {worst_round:.2e} >= 1e-9")
    _require(worst_inertia < 1e-12, f"inertia oracle error {worst_inertia:.2e} >= 1e-12")
    return f"roundtrip {worst_round:.2e}, inertia vs oracle {worst_inertia:.2e}"


# ----------------------------------------------------------------------------
# scripted closure studies


def _write_config(path: str, lines: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for key, value in lines.items():
            handle.write(f"{key}: {value}\n")


def _cli_run(script: str, config_lines: dict, out: str, extra: list[str] = ()) -> None:
    from .cli import main as cli_main

    with tempfile.TemporaryDirectory() as tmp:
        config_path = os.path.join(tmp, "config.yaml")
        _write_config(config_path, config_lines)
        with open(os.devnull, "w") as sink, contextlib.redirect_stdout(sink):
            code = cli_main(
                ["run", "--script", script, "--config", config_path, "--out", out, *extra]
            )
        _require(code == 0, f"cli run --script {script} exited {code}")


def check_circle_closure() -> str:
    """CLI circle run closes to < 1 mm at dt = 1 ms; halving dt halves it."""
    start = time.monotonic()
    noiseless = {"wheel_speed_tracking_tau": 0.0, "dt": 0.001}
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "circle.csv")
        _cli_run("circle_xz", noiseless, out)
        coarse = compute_metrics(import_log(out)).endpoint_deviation
        _cli_run("circle_xz", {**noiseless, "dt": 0.0005}, out)
        fine = compute_metrics(import_log(out)).endpoint_deviation
    elapsed = time.monotonic() - start
    _require(coarse < 1e-3, f"circle endpoint deviation {coarse:.2e} >= 1e-3")
    _require(
        fine <= 0.5 * coarse * 1.05,
        f"halving dt did not halve the deviation: {coarse:.2e} -> {fine:.2e}",
    )
    _require(elapsed < 10.0, f"circle closure took {elapsed:.2f}s >= 10s")
    return f"deviation {coarse:.2e} at 1 ms, {fine:.2e} at 0.5 ms, {elapsed:.1f}s"


def check_square_rhombus_closure() -> str:
    """Square and rhombus close < 1 mm; span sweeps return d to start < 1 um."""
    noiseless = SimConfig(wheel_speed_tracking_tau=0.0, dt=0.001)
    details = []
    for name in ("square", "rhombus"):
        deviation = compute_metrics(run_script(builtin_script(name), noiseless)).endpoint_deviation
        _require(deviation < 1e-3, f"{name} endpoint deviation {deviation:.2e} >= 1e-3")
        details.append(f"{name} {deviation:.2e}")
    sweep_config = SimConfig(wheel_speed_tracking_tau=0.0)
    for name in ("d_sweep_x", "d_sweep_y", "d_sweep_spin"):
        d = run_script(builtin_script(name), sweep_config).column("d")
        gap = abs(d[-1] - d[0])
        _require(gap < 1e-6, f"{name} span return gap {gap:.2e} >= 1e-6")
        details.append(f"{name} {gap:.1e}")
    return ", ".join(details)


def check_qualitative_ordering() -> str:
    """Under 0.5 deg incline + 5 % mass asymmetry, lateral motion drifts the
    heading more than forward motion, and the lateral circle deviates at
    least as much as the forward circle."""
    config = SimConfig(
        wheel_speed_tracking_tau=0.0,
        ground_incline=(math.radians(0.5), 0.0),
        masses=MassPair(2.1, 1.9),
    )

    def line_drift(rates: BodyRates) -> float:
        script = CommandScript("line", (Segment(4.0, rates),))
        metrics = compute_metrics(run_script(script, config))
        return metrics.heading_drift / metrics.path_length

    forward = line_drift(BodyRates(0.5, 0.0, 0.0, 0.0))
    lateral = line_drift(BodyRates(0.0, 0.5, 0.0, 0.0))
    _require(
        lateral > forward,
        f"lateral heading drift {lateral:.2e} not above forward {forward:.2e}",
    )
    xz = compute_metrics(run_script(builtin_script("circle_xz"), config)).endpoint_deviation
    yz = compute_metrics(run_script(builtin_script("circle_yz"), config)).endpoint_deviation
    _require(yz >= xz, f"circle_yz deviation {yz:.2e} below circle_xz {xz:.2e}")
    return (
        f"heading drift/m: lateral {lateral:.2e} > forward {forward:.2e}; "
        f"circles: yz {yz:.3f} >= xz {xz:.3f}"
    )


# ----------------------------------------------------------------------------
# closed-loop control


def check_control_closed_loop() -> str:
    """Distance step settles inside the 2 % band with < 1 mm steady error;
    balance mode catches a 0.05 rad lean within 2 s; anti-windup holds."""
    config = SimConfig()
    step_script = CommandScript(
        "step_d", (Segment(8.0, BodyRates(0, 0, 0, 0), d_setpoint=0.5),)
    )
    log = run_script(step_script, config)
    d = log.column("d")
    t = log.column("t")
    band = [abs(v - 0.5) for v, ti in zip(d, t) if ti > 6.0]
    _require(max(band) < 0.002, f"distance not settled in 2% band: {max(band):.2e}")
    sse = abs(d[-1] - 0.5)
    _require(sse < 1e-3, f"distance steady-state error {sse:.2e} >= 1e-3")

    balance = SimConfig(mode="balance")
    sim = Simulator(balance, initial=replace(make_initial_state(balance), pitch=0.05))
    suite = ControllerSuite(balance.geometry, balance.gains)
    last_bad = None
    for _ in range(round(3.0 / balance.dt)):
        frame = sim.sense()
        correction = suite.balancing_step(frame, 0.0, balance.dt)
        wheels = mix_commands(
            correction, 0.0, 0.0, BodyTwist(0, 0, 0), balance.geometry, sim.state.d
        )
        state = sim.step(tuple(wheels))
        if abs(state.pitch) >= 0.01:
            last_bad = state.t
    _require(
        last_bad is not None and last_bad < 2.0,
        f"pitch recovery incomplete by 2 s (last excursion at {last_bad})",
    )

    gains = PidGains(kp=1.0, ki=5.0, output_min=-1.0, output_max=1.0, integral_limit=0.7)
    memory = PidMemory()
    for _ in range(4000):
        out = pid_step(gains, memory, 30.0, 0.005)
        _require(out == 1.0, "output left the saturation rail unexpectedly")
        _require(abs(memory.integral_accum) <= 0.7, "integral exceeded its bound")
    return (
        f"distance sse {sse:.1e}, band {max(band):.1e}; "
        f"pitch recovered at {last_bad:.2f}s; windup bound held"
    )


# ----------------------------------------------------------------------------
# determinism


def check_determinism() -> str:
    """Two CLI runs with one config and seed produce byte-identical CSVs."""
    noisy = {
        "mode": "balance",
        "seed": 42,
        "noise_draw_wire_rel": 0.001,
        "noise_imu_angle": 0.002,
        "noise_imu_rate": 0.005,
    }
    with tempfile.TemporaryDirectory() as tmp:
        a = os.path.join(tmp, "a.csv")
        b = os.path.join(tmp, "b.csv")
        c = os.path.join(tmp, "c.csv")
        _cli_run("square", noisy, a)
        _cli_run("square", noisy, b)
        _cli_run("square", noisy, c, extra=["--seed", "43"])
        bytes_a = open(a, "rb").read()
        bytes_b = open(b, "rb").read()
        bytes_c = open(c, "rb").read()
    _require(bytes_a == bytes_b, "same config+seed gave different CSV bytes")
    _require(bytes_a != bytes_c, "different seed gave identical noisy CSV bytes")
    return f"{len(bytes_a)} bytes, identical across runs, seed-sensitive"


# ----------------------------------------------------------------------------
# service contract


def _free_port() -> int:
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        return probe.getsockname()[1]


@contextlib.contextmanager
def service_process(config_lines: dict | None = None, rate: int = 200):
    """Spawn ``omnispan serve`` in a subprocess; yields (host, port, tcp_port)."""
    host = "127.0.0.1"
    port = _free_port()
    tcp_port = _free_port()
    with tempfile.TemporaryDirectory() as tmp:
        config_path = os.path.join(tmp, "config.yaml")
        _write_config(config_path, config_lines or {})
        process = subprocess.Popen(
            [
                sys.executable,
                "-m",
                "omnispan.cli",
                "serve",
                "--config",
                config_path,
                "--host",
                host,
                "--port",
                str(port),
                "--tcp-port",
                str(tcp_port),
                "--rate",
                str(rate),
            ],
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )
        try:
            yield host, port, tcp_port
        finally:
            process.terminate()
            try:
                process.wait(timeout=5.0)
            except subprocess.TimeoutExpired:
                process.kill()


def check_service_contract(drift_duration: float = 60.0) -> str:
    """Headless TCP client: silence zeroes the twist within 500 ms, stale
    sequence numbers are discarded, and sim time tracks wall time."""
    config = {"wheel_speed_tracking_tau": 0.02}
    with service_process(config) as (host, _http, tcp_port):
        # 1. command timeout zeroes the applied twist
        with TeleopClient(host, tcp_port) as driver:
            driver.next_state()
            sent_at = time.monotonic()
            driver.send_command(vx=0.5)
            reached = False
            while time.monotonic() - sent_at < 1.0:
                if driver.next_state()["vx"] > 0.4:
                    reached = True
                    break
            _require(reached, "commanded twist never reached the plant")
            zero_at = None
            while time.monotonic() - sent_at < 2.0:
                state = driver.next_state()
                if abs(state["vx"]) < 0.02:
                    zero_at = time.monotonic()
                    break
            _require(zero_at is not None, "twist never decayed after command silence")
            timeout_lag = zero_at - sent_at
            _require(
                timeout_lag <= 0.5,
                f"twist still live {timeout_lag * 1000:.0f} ms after last command",
            )

        # 2. out-of-order sequence numbers are discarded
        with TeleopClient(host, tcp_port) as driver:
            driver.next_state()
            driver.send_command(vx=0.2, seq=10)
            driver.send_command(vx=0.4, seq=12)
            driver.send_command(vx=0.9, seq=11)
            states = driver.drain_states(0.25)
            _require(bool(states), "no broadcasts while holding the command")
            vx = states[-1][1]["vx"]
            _require(
                0.3 < vx < 0.5,
                f"stale seq applied: realized vx {vx:.3f}, wanted ~0.4",
            )

        # 3. wall-clock fidelity of the stepping loop
        with TeleopClient(host, tcp_port) as observer:
            states = observer.drain_states(drift_duration)
            _require(len(states) > 10, "too few broadcasts for a drift estimate")
            (wall0, first), (wall1, last) = states[0], states[-1]
            sim_span = last["t"] - first["t"]
            wall_span = wall1 - wall0
            drift = abs(sim_span - wall_span) / wall_span
            _require(
                drift < 0.01,
                f"sim time drifted {drift * 100:.2f}% from wall clock",
            )
    return (
        f"timeout zeroed in {timeout_lag * 1000:.0f} ms; stale seq discarded; "
        f"drift {drift * 100:.3f}% over {wall_span:.0f}s"
    )


# ----------------------------------------------------------------------------
# runner

CRITERIA = (
    ("matrix-identities", check_matrix_identities),
    ("oracle-equivalence", check_oracle_equivalence),
    ("kinematic-roundtrips", check_kinematic_roundtrips),
    ("dynamics-roundtrip", check_dynamics_roundtrip),
    ("circle-closure", check_circle_closure),
    ("square-rhombus-closure", check_square_rhombus_closure),
    ("qualitative-ordering", check_qualitative_ordering),
    ("control-closed-loop", check_control_closed_loop),
    ("determinism", check_determinism),
    ("service-contract", check_service_contract),
)


def run_all(only: str | None = None, skip_service: bool = False) -> list[CriterionResult]:
    results = []
    for name, check in CRITERIA:
        if only is not None and name != only:
            continue
        if skip_service and name == "service-contract":
            continue
        start = time.monotonic()
        try:
            detail = check()
            passed = True
        except CheckFailed as exc:
            detail = str(exc)
            passed = False
        results.append(CriterionResult(name, passed, detail, time.monotonic() - start))
    return results
