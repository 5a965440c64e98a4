"""Trajectory log container and its CSV form.

One row per simulation step, SI units throughout.  Floats are written
with shortest round-trip repr, so export followed by import reproduces
the log exactly and identical runs produce byte-identical files.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .errors import EmptyLog, IoFailure

COLUMNS = (
    "t",
    "x",
    "y",
    "phi",
    "d",
    "pitch",
    "vx",
    "vy",
    "wz",
    "ddot",
    "th1",
    "th2",
    "th3",
    "th4",
    "cmd_vx",
    "cmd_vy",
    "cmd_wz",
    "cmd_ddot",
)

HEADER = ",".join(COLUMNS)


@dataclass
class TrajectoryLog:
    """Time-stamped record of pose, spacing, commands, and wheel speeds."""

    rows: list[tuple[float, ...]] = field(default_factory=list)

    def append(self, row: tuple[float, ...]) -> None:
        if len(row) != len(COLUMNS):
            raise ValueError(f"expected {len(COLUMNS)} columns, got {len(row)}")
        self.rows.append(row)

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list[float]:
        index = COLUMNS.index(name)
        return [row[index] for row in self.rows]

    def require_rows(self) -> None:
        if not self.rows:
            raise EmptyLog("trajectory log has no rows")


def export_log(log: TrajectoryLog, path: str | os.PathLike) -> None:
    """Write the log as CSV; header always present, even for empty logs."""
    try:
        with open(path, "w", encoding="ascii", newline="\n") as handle:
            handle.write(HEADER + "\n")
            for row in log.rows:
                handle.write(",".join(repr(value) for value in row) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write log to {path}: {exc}") from exc


def import_log(path: str | os.PathLike) -> TrajectoryLog:
    """Read a CSV written by :func:`export_log`; lossless round trip."""
    try:
        with open(path, "r", encoding="ascii") as handle:
            header = handle.readline().strip()
            if header != HEADER:
                raise IoFailure(f"unexpected log header in {path}: {header!r}")
            log = TrajectoryLog()
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                log.append(tuple(float(cell) for cell in line.split(",")))
    except OSError as exc:
        raise IoFailure(f"cannot read log from {path}: {exc}") from exc
    return log
