/**
 * Pure geometry behind the top-down view: robot footprint from the
 * broadcast state, world/screen mapping, and rectangle overlap tests.
 * Kept canvas-free so the render math is testable headlessly.
 */

import type { CourseRect, StateMessage } from "./messages.js";

export interface Point {
  x: number;
  y: number;
}

export interface Camera {
  cx: number; // world coords at the canvas center
  cy: number;
  scale: number; // pixels per meter
}

/** Fixed drawing dimensions of the rig, meters. */
export const WHEEL_GROUP_LENGTH = 0.26; // along body x
export const WHEEL_GROUP_WIDTH = 0.24; // along body y (covers the wheel pair)

export function worldToScreen(p: Point, camera: Camera, width: number, height: number): Point {
  return {
    x: width / 2 + (p.x - camera.cx) * camera.scale,
    y: height / 2 - (p.y - camera.cy) * camera.scale,
  };
}

/**
 * Centers of the two wheel groups: the body center offset by half the
 * live spacing along the axle line. Their distance is exactly d.
 */
export function groupCenters(state: Pick<StateMessage, "x" | "y" | "phi" | "d">): [Point, Point] {
  const axleX = -Math.sin(state.phi);
  const axleY = Math.cos(state.phi);
  const half = state.d / 2;
  return [
    { x: state.x + axleX * half, y: state.y + axleY * half },
    { x: state.x - axleX * half, y: state.y - axleY * half },
  ];
}

/** Corner points of an oriented rectangle (center pose + extents). */
export function rectCorners(rect: CourseRect): Point[] {
  const c = Math.cos(rect.phi);
  const s = Math.sin(rect.phi);
  const hw = rect.width / 2;
  const hh = rect.height / 2;
  return [
    { x: rect.x + c * hw - s * hh, y: rect.y + s * hw + c * hh },
    { x: rect.x - c * hw - s * hh, y: rect.y - s * hw + c * hh },
    { x: rect.x - c * hw + s * hh, y: rect.y - s * hw - c * hh },
    { x: rect.x + c * hw + s * hh, y: rect.y + s * hw - c * hh },
  ];
}

/**
 * Robot footprint as an oriented rectangle spanning both wheel groups:
 * width follows the live spacing, length is the wheel-group length.
 */
export function robotFootprint(
  state: Pick<StateMessage, "x" | "y" | "phi" | "d">,
): CourseRect {
  return {
    x: state.x,
    y: state.y,
    phi: state.phi,
    width: WHEEL_GROUP_LENGTH,
    height: state.d + WHEEL_GROUP_WIDTH,
  };
}

function projectOntoAxis(points: Point[], axis: Point): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const p of points) {
    const v = p.x * axis.x + p.y * axis.y;
    lo = Math.min(lo, v);
    hi = Math.max(hi, v);
  }
  return [lo, hi];
}

/** Separating-axis overlap test for two convex quadrilaterals. */
export function polygonsIntersect(a: Point[], b: Point[]): boolean {
  for (const poly of [a, b]) {
    for (let i = 0; i < poly.length; i++) {
      const p = poly[i];
      const q = poly[(i + 1) % poly.length];
      const axis = { x: -(q.y - p.y), y: q.x - p.x };
      const [aLo, aHi] = projectOntoAxis(a, axis);
      const [bLo, bHi] = projectOntoAxis(b, axis);
      if (aHi < bLo || bHi < aLo) return false;
    }
  }
  return true;
}

export function rectsIntersect(a: CourseRect, b: CourseRect): boolean {
  return polygonsIntersect(rectCorners(a), rectCorners(b));
}

/** Obstacles the robot footprint currently overlaps. */
export function collidingObstacles(
  state: Pick<StateMessage, "x" | "y" | "phi" | "d">,
  obstacles: CourseRect[],
): CourseRect[] {
  const footprint = robotFootprint(state);
  return obstacles.filter((rect) => rectsIntersect(footprint, rect));
}
