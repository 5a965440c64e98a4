"""Teleop service wire contract over the raw TCP transport."""

import json
import time
import urllib.request

import pytest

from omnispan.acceptance import service_process
from omnispan.service import Course, Rect, load_course
from omnispan.testclient import TeleopClient


@pytest.fixture(scope="module")
def running_service():
    with service_process({"wheel_speed_tracking_tau": 0.02}) as endpoints:
        yield endpoints


def test_states_broadcast_without_any_driver(running_service):
    host, _http, tcp = running_service
    with TeleopClient(host, tcp) as client:
        state = client.next_state()
        assert state["type"] == "state"
        assert state["vx"] == 0.0 and state["vy"] == 0.0
        assert state["course"] == "open-floor"


def test_broadcast_rate_close_to_50hz(running_service):
    host, _http, tcp = running_service
    with TeleopClient(host, tcp) as client:
        client.next_state()
        states = client.drain_states(1.0)
    assert 35 <= len(states) <= 65


def test_command_moves_robot_and_motion_is_sane(running_service):
    host, _http, tcp = running_service
    with TeleopClient(host, tcp) as driver:
        driver.next_state()
        start = driver.next_state()
        deadline = time.monotonic() + 1.5
        state = start
        while time.monotonic() < deadline:
            driver.send_command(vx=0.5)
            state = driver.next_state()
        advance = state["x"] - start["x"]
        # held for ~1.5 s at 0.5 m/s through the tracking lag
        assert 0.5 < advance < 0.9


def test_malformed_message_keeps_connection(running_service):
    host, _http, tcp = running_service
    with TeleopClient(host, tcp) as client:
        client.send_raw("this is not json")
        error = client.next_error()
        assert error["error"] == "MalformedMessage"
        # connection still streams states afterwards
        assert client.next_state()["type"] == "state"
        # commands missing required fields are malformed too
        client.send_raw(json.dumps({"type": "cmd", "vx": 0.1}))
        assert client.next_error()["error"] == "MalformedMessage"


def test_single_driver_slot(running_service):
    host, _http, tcp = running_service
    with TeleopClient(host, tcp) as first:
        first.send_command(vx=0.1)
        first.next_state()
        with TeleopClient(host, tcp) as second:
            second.send_command(vx=0.3)
            assert second.next_error()["error"] == "DriverSlotBusy"
    # slot frees on disconnect
    time.sleep(0.1)
    with TeleopClient(host, tcp) as third:
        third.send_command(vx=0.2)
        states = third.drain_states(0.3)
        assert states and abs(states[-1][1]["vx"]) > 0.1


def test_short_session_time_fidelity(running_service):
    host, _http, tcp = running_service
    with TeleopClient(host, tcp) as observer:
        states = observer.drain_states(2.0)
    (wall0, first), (wall1, last) = states[0], states[-1]
    drift = abs((last["t"] - first["t"]) - (wall1 - wall0)) / (wall1 - wall0)
    assert drift < 0.05


def test_course_endpoint_and_spawn(tmp_path):
    course_path = tmp_path / "slalom.json"
    course_path.write_text(
        json.dumps(
            {
                "name": "slalom",
                "spawn": {"x": 1.5, "y": -0.5, "phi": 0.25},
                "obstacles": [
                    {"x": 2.0, "y": 0.0, "phi": 0.0, "width": 0.4, "height": 1.0}
                ],
            }
        )
    )
    loaded = load_course(course_path)
    assert loaded == Course(
        name="slalom", spawn=(1.5, -0.5, 0.25), obstacles=(Rect(2.0, 0.0, 0.0, 0.4, 1.0),)
    )

    import subprocess
    import sys

    from omnispan.acceptance import _free_port

    port, tcp_port = _free_port(), _free_port()
    process = subprocess.Popen(
        [
            sys.executable,
            "-m",
            "omnispan.cli",
            "serve",
            "--course",
            str(course_path),
            "--port",
            str(port),
            "--tcp-port",
            str(tcp_port),
        ],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    try:
        with TeleopClient("127.0.0.1", tcp_port) as client:
            state = client.next_state()
            assert state["course"] == "slalom"
            assert state["x"] == pytest.approx(1.5)
            assert state["phi"] == pytest.approx(0.25)
        with urllib.request.urlopen(f"http://127.0.0.1:{port}/course", timeout=2.0) as resp:
            served = json.loads(resp.read())
        assert served["name"] == "slalom"
        assert served["obstacles"][0]["width"] == 0.4
        with urllib.request.urlopen(f"http://127.0.0.1:{port}/", timeout=2.0) as resp:
            assert b"omnispan" in resp.read()
    finally:
        process.terminate()
        process.wait(timeout=5.0)


def test_teleop_distance_setpoint_engages_loop(running_service):
    host, _http, tcp = running_service
    with TeleopClient(host, tcp) as driver:
        driver.next_state()
        deadline = time.monotonic() + 2.5
        state = None
        while time.monotonic() < deadline:
            driver.send_command(d_setpoint=0.55)
            state = driver.next_state()
        assert state is not None and state["d"] == pytest.approx(0.55, abs=5e-3)
