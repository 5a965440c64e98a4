/**
 * View-side state: camera pan/zoom, the bounded pose trail, HUD values,
 * and staleness tracking. All of it derives from received StateMessages;
 * the view never predicts motion on its own.
 */

import type { Camera, Point } from "./geometry.js";
import type { StateMessage } from "./messages.js";

export const STALE_AFTER_S = 1.0;

export class Trail {
  private points: Point[] = [];
  private next = 0;

  constructor(readonly capacity = 600) {}

  push(p: Point): void {
    if (this.points.length < this.capacity) {
      this.points.push(p);
    } else {
      this.points[this.next] = p;
      this.next = (this.next + 1) % this.capacity;
    }
  }

  get length(): number {
    return this.points.length;
  }

  /** Oldest-to-newest snapshot of the ring. */
  ordered(): Point[] {
    if (this.points.length < this.capacity) return [...this.points];
    return [...this.points.slice(this.next), ...this.points.slice(0, this.next)];
  }

  clear(): void {
    this.points = [];
    this.next = 0;
  }
}

export class ViewState {
  camera: Camera = { cx: 0, cy: 0, scale: 120 };
  trail = new Trail();
  lastState: StateMessage | null = null;
  lastMessageWall: number | null = null;
  connection: "connecting" | "connected" | "closed" = "connecting";
  note = "";

  /** Record one broadcast state; wallTime in seconds. */
  accept(state: StateMessage, wallTime: number): void {
    this.lastState = state;
    this.lastMessageWall = wallTime;
    this.trail.push({ x: state.x, y: state.y });
  }

  stale(nowWall: number): boolean {
    return (
      this.lastMessageWall !== null && nowWall - this.lastMessageWall > STALE_AFTER_S
    );
  }

  zoom(factor: number): void {
    this.camera.scale = Math.min(600, Math.max(20, this.camera.scale * factor));
  }

  pan(dxPixels: number, dyPixels: number): void {
    this.camera.cx -= dxPixels / this.camera.scale;
    this.camera.cy += dyPixels / this.camera.scale;
  }

  /** Keep the robot centered unless the user panned away. */
  follow(): void {
    if (this.lastState) {
      this.camera.cx = this.lastState.x;
      this.camera.cy = this.lastState.y;
    }
  }
}
