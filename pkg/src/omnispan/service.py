"""Real-time serving layer: fixed-rate sim loop, command intake, broadcast.

Wire protocol, shared by the WebSocket endpoint (``GET /ws``) and the raw
TCP listener: newline-delimited JSON objects, SI-unit floats, unknown
fields ignored.

    driver -> service   {"type": "cmd", "vx": 0.4, "vy": 0.0, "wz": 0.1,
                         "ddot": 0.0, "seq": 12}
                        optional "d_setpoint" engages the distance loop
    service -> clients  {"type": "state", "t": ..., "x": ..., "y": ...,
                         "phi": ..., "d": ..., "pitch": ..., "vx": ...,
                         "vy": ..., "wz": ..., "ddot": ..., "course": id}
    service -> sender   {"type": "error", "error": "...", "detail": "..."}

Rules: command magnitudes are clamped to the configured limits on
receipt; per connection, sequence numbers must strictly increase and
stale ones are discarded (latest command wins); exactly one connection
holds the driver slot at a time (claimed by the first command, released
on disconnect); command silence beyond the timeout zeroes the applied
twist.  Malformed lines are answered with an error message and the
connection stays open.

Concurrency: one stepping task owns the simulator; connection handlers
only write the latest-command mailbox; the broadcast fan-out reads the
published immutable snapshots.  State messages go out at a fixed 50 Hz
regardless of the simulation rate.
"""

from __future__ import annotations

import asyncio
import json
import logging
import math
import os
from dataclasses import dataclass, replace

from aiohttp import WSMsgType, web

from .control import ControllerSuite, mix_commands
from .drive import BodyTwist, clamp
from .errors import ConfigError, IoFailure, PortUnavailable
from .sim import RobotState, SimConfig, Simulator, make_initial_state

logger = logging.getLogger("omnispan.service")

BROADCAST_HZ = 50.0
COMMAND_TIMEOUT = 0.3  # s of silence before the applied twist is zeroed

_FALLBACK_PAGE = b"""<!doctype html>
<html><head><title>omnispan</title></head>
<body style="font-family: sans-serif">
<h2>omnispan teleop service</h2>
<p>The browser client is not built. Build it with
<code>cd frontend &amp;&amp; npm install &amp;&amp; npm run build</code>
and restart, or pass <code>--ui</code> with the build directory.</p>
<p>WebSocket endpoint: <code>/ws</code>; course data: <code>/course</code>.</p>
</body></html>
"""


@dataclass(frozen=True)
class Rect:
    """One obstacle: center pose plus extents, world frame."""

    x: float
    y: float
    phi: float
    width: float
    height: float


@dataclass(frozen=True)
class Course:
    """Obstacle course: a name, a spawn pose, and rectangles to avoid."""

    name: str
    spawn: tuple[float, float, float]
    obstacles: tuple[Rect, ...]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "spawn": {"x": self.spawn[0], "y": self.spawn[1], "phi": self.spawn[2]},
            "obstacles": [
                {"x": r.x, "y": r.y, "phi": r.phi, "width": r.width, "height": r.height}
                for r in self.obstacles
            ],
        }


def load_course(path: str | os.PathLike) -> Course:
    """Read a course file: name, spawn pose, rectangle list."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise IoFailure(f"cannot read course {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"course {path} is not valid JSON: {exc}") from exc
    try:
        spawn = raw.get("spawn", {})
        obstacles = tuple(
            Rect(
                float(o["x"]),
                float(o["y"]),
                float(o.get("phi", 0.0)),
                float(o["width"]),
                float(o["height"]),
            )
            for o in raw.get("obstacles", [])
        )
        return Course(
            name=str(raw.get("name", "unnamed")),
            spawn=(
                float(spawn.get("x", 0.0)),
                float(spawn.get("y", 0.0)),
                float(spawn.get("phi", 0.0)),
            ),
            obstacles=obstacles,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"course {path} has a malformed entry: {exc}") from exc


EMPTY_COURSE = Course(name="open-floor", spawn=(0.0, 0.0, 0.0), obstacles=())


@dataclass
class _Command:
    vx: float = 0.0
    vy: float = 0.0
    wz: float = 0.0
    ddot: float = 0.0
    d_setpoint: float | None = None


class _Connection:
    """Per-client bookkeeping shared by both transports."""

    def __init__(self, service: "TeleopService", label: str):
        self.service = service
        self.label = label
        self.last_seq: int | None = None
        self.outbox: asyncio.Queue[str] = asyncio.Queue(maxsize=64)

    def send(self, line: str) -> None:
        # drop for slow consumers rather than stalling the broadcaster
        try:
            self.outbox.put_nowait(line)
        except asyncio.QueueFull:
            pass


class TeleopService:
    """Fixed-rate simulation service with one driver and many observers."""

    def __init__(
        self,
        config: SimConfig,
        course: Course = EMPTY_COURSE,
        rate: int = 200,
        broadcast_hz: float = BROADCAST_HZ,
        command_timeout: float = COMMAND_TIMEOUT,
    ):
        if rate <= 0:
            raise ConfigError(f"rate must be positive, got {rate}")
        self.config = replace(config, dt=1.0 / rate)
        self.course = course
        self.rate = rate
        self.decimate = max(1, round(rate / broadcast_hz))
        self.command_timeout = command_timeout
        spawn = course.spawn
        initial = replace(
            make_initial_state(self.config), x=spawn[0], y=spawn[1], phi=spawn[2]
        )
        self.sim = Simulator(self.config, initial=initial)
        self.suite = ControllerSuite(self.config.geometry, self.config.gains)
        self.snapshot: RobotState = self.sim.state
        self._command = _Command()
        self._command_wall: float | None = None
        self._driver: _Connection | None = None
        self._connections: set[_Connection] = set()
        self._step_task: asyncio.Task | None = None
        self._tcp_server: asyncio.AbstractServer | None = None
        self._runner: web.AppRunner | None = None
        self.ui_dir: str | None = None
        self.ticks = 0

    # ----- message handling ------------------------------------------------

    def _error_line(self, error: str, detail: str) -> str:
        return json.dumps({"type": "error", "error": error, "detail": detail})

    def handle_line(self, conn: _Connection, line: str) -> None:
        """Apply one inbound line; replies go through the connection outbox."""
        line = line.strip()
        if not line:
            return
        try:
            message = json.loads(line)
            if not isinstance(message, dict):
                raise ValueError("message must be a JSON object")
        except ValueError as exc:
            logger.warning("malformed message from %s: %s", conn.label, exc)
            conn.send(self._error_line("MalformedMessage", str(exc)))
            return
        if message.get("type") != "cmd":
            # unknown message types are ignored, like unknown fields
            return
        if self._driver is not None and self._driver is not conn:
            conn.send(self._error_line("DriverSlotBusy", "another driver is connected"))
            return
        try:
            seq = int(message["seq"])
            values = {
                key: float(message.get(key, 0.0)) for key in ("vx", "vy", "wz", "ddot")
            }
            d_setpoint = message.get("d_setpoint")
            if d_setpoint is not None:
                d_setpoint = float(d_setpoint)
            if any(not math.isfinite(v) for v in values.values()):
                raise ValueError("command values must be finite")
        except (KeyError, TypeError, ValueError) as exc:
            logger.warning("malformed command from %s: %s", conn.label, exc)
            conn.send(self._error_line("MalformedMessage", str(exc)))
            return
        if conn.last_seq is not None and seq <= conn.last_seq:
            return  # stale or duplicate command: latest wins
        conn.last_seq = seq
        self._driver = conn
        limits = self.config.command_limits
        self._command = _Command(
            vx=clamp(values["vx"], -limits[0], limits[0]),
            vy=clamp(values["vy"], -limits[1], limits[1]),
            wz=clamp(values["wz"], -limits[2], limits[2]),
            ddot=clamp(values["ddot"], -limits[3], limits[3]),
            d_setpoint=d_setpoint,
        )
        self._command_wall = asyncio.get_running_loop().time()

    def _drop_connection(self, conn: _Connection) -> None:
        self._connections.discard(conn)
        if self._driver is conn:
            self._driver = None
            self._command = _Command()
            self._command_wall = None

    # ----- stepping and broadcast -------------------------------------------

    def _state_line(self) -> str:
        s = self.snapshot
        return json.dumps(
            {
                "type": "state",
                "t": s.t,
                "x": s.x,
                "y": s.y,
                "phi": s.phi,
                "d": s.d,
                "pitch": s.pitch,
                "vx": s.rate.vx,
                "vy": s.rate.vy,
                "wz": s.rate.wz,
                "ddot": s.rate.ddot,
                "course": self.course.name,
            }
        )

    def _step_once(self, command: _Command) -> None:
        dt = self.config.dt
        frame = self.sim.sense()
        if self.config.mode == "balance":
            balance = self.suite.balancing_step(frame, command.vx, dt)
        else:
            balance = 0.0
        if command.d_setpoint is not None:
            d_rate = self.suite.distance_step(frame, command.d_setpoint, dt)
        else:
            d_rate = command.ddot
        wheels = mix_commands(
            balance,
            command.wz,
            d_rate,
            BodyTwist(command.vx, command.vy, 0.0),
            self.config.geometry,
            self.sim.state.d,
        )
        self.snapshot = self.sim.step(tuple(wheels))

    async def _run_loop(self) -> None:
        loop = asyncio.get_running_loop()
        dt = self.config.dt
        deadline = loop.time()
        zero = _Command()
        while True:
            deadline += dt
            delay = deadline - loop.time()
            if delay > 0.0:
                await asyncio.sleep(delay)
            elif delay < -0.25:
                deadline = loop.time()  # stall guard: resynchronize
            silent = (
                self._command_wall is None
                or loop.time() - self._command_wall > self.command_timeout
            )
            self._step_once(zero if silent else self._command)
            self.ticks += 1
            if self.ticks % self.decimate == 0:
                line = self._state_line()
                for conn in tuple(self._connections):
                    conn.send(line)

    # ----- transports -------------------------------------------------------

    async def _tcp_client(
        self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter
    ) -> None:
        peer = writer.get_extra_info("peername")
        conn = _Connection(self, f"tcp:{peer}")
        self._connections.add(conn)

        async def pump_out() -> None:
            while True:
                line = await conn.outbox.get()
                writer.write(line.encode("utf-8") + b"\n")
                await writer.drain()

        sender = asyncio.create_task(pump_out())
        try:
            while True:
                raw = await reader.readline()
                if not raw:
                    break
                self.handle_line(conn, raw.decode("utf-8", errors="replace"))
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            sender.cancel()
            self._drop_connection(conn)
            writer.close()

    async def _ws_handler(self, request: web.Request) -> web.WebSocketResponse:
        ws = web.WebSocketResponse(heartbeat=20.0)
        await ws.prepare(request)
        conn = _Connection(self, f"ws:{request.remote}")
        self._connections.add(conn)

        async def pump_out() -> None:
            while True:
                line = await conn.outbox.get()
                await ws.send_str(line)

        sender = asyncio.create_task(pump_out())
        try:
            async for message in ws:
                if message.type == WSMsgType.TEXT:
                    for line in message.data.splitlines():
                        self.handle_line(conn, line)
                elif message.type == WSMsgType.ERROR:
                    break
        finally:
            sender.cancel()
            self._drop_connection(conn)
        return ws

    async def _index(self, _request: web.Request) -> web.Response:
        if self.ui_dir:
            index = os.path.join(self.ui_dir, "index.html")
            if os.path.exists(index):
                return web.FileResponse(index)
        return web.Response(body=_FALLBACK_PAGE, content_type="text/html")

    async def _course_endpoint(self, _request: web.Request) -> web.Response:
        return web.json_response(self.course.to_json())

    # ----- lifecycle ----------------------------------------------------------

    async def start(
        self,
        host: str = "127.0.0.1",
        port: int = 8700,
        tcp_port: int | None = None,
        ui_dir: str | None = None,
    ) -> None:
        """Bind the HTTP/WebSocket port and the raw TCP port, start stepping."""
        if ui_dir is not None:
            self.ui_dir = ui_dir if os.path.isdir(ui_dir) else None
        else:
            default_ui = os.path.join("frontend", "dist")
            self.ui_dir = default_ui if os.path.isdir(default_ui) else None
        app = web.Application()
        app.router.add_get("/", self._index)
        app.router.add_get("/course", self._course_endpoint)
        app.router.add_get("/ws", self._ws_handler)
        if self.ui_dir:
            assets = os.path.join(self.ui_dir, "assets")
            app.router.add_static("/assets", assets if os.path.isdir(assets) else self.ui_dir)
        self._runner = web.AppRunner(app)
        await self._runner.setup()
        try:
            site = web.TCPSite(self._runner, host, port)
            await site.start()
            self._tcp_server = await asyncio.start_server(
                self._tcp_client, host, tcp_port if tcp_port is not None else port + 1
            )
        except OSError as exc:
            await self._runner.cleanup()
            raise PortUnavailable(f"cannot bind service ports: {exc}") from exc
        self._step_task = asyncio.create_task(self._run_loop())
        logger.info(
            "serving on %s:%d (ws) and :%d (tcp), course %r, %d Hz",
            host,
            port,
            tcp_port if tcp_port is not None else port + 1,
            self.course.name,
            self.rate,
        )

    async def stop(self) -> None:
        if self._step_task:
            self._step_task.cancel()
            try:
                await self._step_task
            except asyncio.CancelledError:
                pass
        if self._tcp_server:
            self._tcp_server.close()
            await self._tcp_server.wait_closed()
        if self._runner:
            await self._runner.cleanup()

    async def serve_forever(self) -> None:
        try:
            await asyncio.Event().wait()
        finally:
            await self.stop()


async def serve(
    config: SimConfig,
    course: Course = EMPTY_COURSE,
    host: str = "127.0.0.1",
    port: int = 8700,
    tcp_port: int | None = None,
    rate: int = 200,
    ui_dir: str | None = None,
) -> None:
    """Run the teleop service until cancelled."""
    service = TeleopService(config, course, rate=rate)
    await service.start(host=host, port=port, tcp_port=tcp_port, ui_dir=ui_dir)
    await service.serve_forever()
