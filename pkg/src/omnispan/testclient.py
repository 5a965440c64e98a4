"""Headless wire client for the teleop service, over the raw TCP transport.

Synchronous and dependency-free on purpose: acceptance checks and scripts
drive the service with it, no browser or UI build involved.  Messages are
the same newline-delimited JSON objects the WebSocket transport carries.
"""

from __future__ import annotations

import json
import socket
import time

from .errors import MalformedMessage


class TeleopClient:
    """Blocking line-oriented client for the service's TCP port."""

    def __init__(self, host: str, port: int, connect_timeout: float = 5.0):
        deadline = time.monotonic() + connect_timeout
        last_error: Exception | None = None
        while time.monotonic() < deadline:
            try:
                self.sock = socket.create_connection((host, port), timeout=1.0)
                break
            except OSError as exc:
                last_error = exc
                time.sleep(0.05)
        else:
            raise ConnectionError(f"cannot reach service at {host}:{port}: {last_error}")
        self.file = self.sock.makefile("rwb")
        self._seq = 0

    def close(self) -> None:
        try:
            self.file.close()
        finally:
            self.sock.close()

    def __enter__(self) -> "TeleopClient":
        return self

    def __exit__(self, *_exc) -> None:
        self.close()

    def send_raw(self, line: str) -> None:
        self.file.write(line.encode("utf-8") + b"\n")
        self.file.flush()

    def send_command(
        self,
        vx: float = 0.0,
        vy: float = 0.0,
        wz: float = 0.0,
        ddot: float = 0.0,
        d_setpoint: float | None = None,
        seq: int | None = None,
    ) -> int:
        """Send one command; auto-increments the sequence number."""
        if seq is None:
            self._seq += 1
            seq = self._seq
        else:
            self._seq = max(self._seq, seq)
        message = {"type": "cmd", "vx": vx, "vy": vy, "wz": wz, "ddot": ddot, "seq": seq}
        if d_setpoint is not None:
            message["d_setpoint"] = d_setpoint
        self.send_raw(json.dumps(message))
        return seq

    def read_message(self, timeout: float = 2.0) -> dict:
        """Block for the next message; raises TimeoutError when none arrives."""
        self.sock.settimeout(timeout)
        try:
            raw = self.file.readline()
        except socket.timeout as exc:
            raise TimeoutError("no message from service") from exc
        if not raw:
            raise ConnectionError("service closed the connection")
        try:
            message = json.loads(raw.decode("utf-8"))
        except ValueError as exc:
            raise MalformedMessage(f"service sent invalid JSON: {raw!r}") from exc
        if not isinstance(message, dict) or "type" not in message:
            raise MalformedMessage(f"service sent a non-message: {message!r}")
        return message

    def next_state(self, timeout: float = 2.0) -> dict:
        """Next state message, skipping anything else."""
        deadline = time.monotonic() + timeout
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise TimeoutError("no state message from service")
            message = self.read_message(timeout=remaining)
            if message["type"] == "state":
                return message

    def next_error(self, timeout: float = 2.0) -> dict:
        """Next error message, skipping state broadcasts."""
        deadline = time.monotonic() + timeout
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise TimeoutError("no error message from service")
            message = self.read_message(timeout=remaining)
            if message["type"] == "error":
                return message

    def drain_states(self, duration: float) -> list[tuple[float, dict]]:
        """Collect (wall_time, state) pairs for the given wall duration."""
        states: list[tuple[float, dict]] = []
        deadline = time.monotonic() + duration
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return states
            try:
                message = self.read_message(timeout=remaining)
            except TimeoutError:
                return states
            if message["type"] == "state":
                states.append((time.monotonic(), message))
