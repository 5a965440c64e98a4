/**
 * Wire message types shared with the simulation service.
 *
 * Everything on the wire is one JSON object per line / per WebSocket text
 * frame, SI-unit floats. Inbound parsing is tolerant: unknown fields are
 * ignored, unknown message types are dropped.
 */

export interface CommandMessage {
  type: "cmd";
  vx: number;
  vy: number;
  wz: number;
  ddot: number;
  seq: number;
  d_setpoint?: number;
}

export interface StateMessage {
  type: "state";
  t: number;
  x: number;
  y: number;
  phi: number;
  d: number;
  pitch: number;
  vx: number;
  vy: number;
  wz: number;
  ddot: number;
  course: string;
}

export interface ErrorMessage {
  type: "error";
  error: string;
  detail?: string;
}

const STATE_NUMBERS = [
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
] as const;

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null;
}

/** Narrow an arbitrary parsed object to a StateMessage, or null. */
export function asStateMessage(value: unknown): StateMessage | null {
  if (!isRecord(value) || value["type"] !== "state") return null;
  for (const key of STATE_NUMBERS) {
    const field = value[key];
    if (typeof field !== "number" || !Number.isFinite(field)) return null;
  }
  return value as unknown as StateMessage;
}

export function asErrorMessage(value: unknown): ErrorMessage | null {
  if (!isRecord(value) || value["type"] !== "error") return null;
  if (typeof value["error"] !== "string") return null;
  return value as unknown as ErrorMessage;
}

export interface CourseRect {
  x: number;
  y: number;
  phi: number;
  width: number;
  height: number;
}

export interface Course {
  name: string;
  spawn: { x: number; y: number; phi: number };
  obstacles: CourseRect[];
}

export function asCourse(value: unknown): Course | null {
  if (!isRecord(value) || typeof value["name"] !== "string") return null;
  const obstacles = Array.isArray(value["obstacles"]) ? value["obstacles"] : [];
  const rects: CourseRect[] = [];
  for (const entry of obstacles) {
    if (!isRecord(entry)) return null;
    const { x, y, width, height } = entry as Record<string, unknown>;
    if (
      typeof x !== "number" ||
      typeof y !== "number" ||
      typeof width !== "number" ||
      typeof height !== "number"
    ) {
      return null;
    }
    rects.push({
      x,
      y,
      phi: typeof entry["phi"] === "number" ? (entry["phi"] as number) : 0,
      width,
      height,
    });
  }
  const spawn = isRecord(value["spawn"]) ? (value["spawn"] as Record<string, unknown>) : {};
  return {
    name: value["name"] as string,
    spawn: {
      x: typeof spawn["x"] === "number" ? (spawn["x"] as number) : 0,
      y: typeof spawn["y"] === "number" ? (spawn["y"] as number) : 0,
      phi: typeof spawn["phi"] === "number" ? (spawn["phi"] as number) : 0,
    },
    obstacles: rects,
  };
}
