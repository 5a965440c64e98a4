/**
 * Canvas drawing of the top-down scene. All geometry comes from
 * geometry.ts; this file only strokes and fills.
 */

import {
  collidingObstacles,
  groupCenters,
  rectCorners,
  robotFootprint,
  worldToScreen,
  WHEEL_GROUP_LENGTH,
  WHEEL_GROUP_WIDTH,
  type Camera,
  type Point,
} from "./geometry.js";
import type { Course, CourseRect, StateMessage } from "./messages.js";
import type { ViewState } from "./view.js";

const COLORS = {
  background: "#10141a",
  grid: "#1d242e",
  trail: "#3d85c6",
  body: "#9fc5e8",
  group: "#e3eefc",
  obstacle: "#6a5a2b",
  obstacleEdge: "#c9a94e",
  warning: "#e06666",
  text: "#d7dde5",
};

function tracePolygon(ctx: CanvasRenderingContext2D, corners: Point[], camera: Camera, w: number, h: number) {
  ctx.beginPath();
  corners.forEach((corner, i) => {
    const p = worldToScreen(corner, camera, w, h);
    if (i === 0) ctx.moveTo(p.x, p.y);
    else ctx.lineTo(p.x, p.y);
  });
  ctx.closePath();
}

function drawGrid(ctx: CanvasRenderingContext2D, camera: Camera, w: number, h: number) {
  ctx.strokeStyle = COLORS.grid;
  ctx.lineWidth = 1;
  const span = Math.max(w, h) / camera.scale;
  const x0 = Math.floor(camera.cx - span) | 0;
  const y0 = Math.floor(camera.cy - span) | 0;
  for (let i = 0; i <= 2 * span + 2; i++) {
    const vx = worldToScreen({ x: x0 + i, y: 0 }, camera, w, h).x;
    ctx.beginPath();
    ctx.moveTo(vx, 0);
    ctx.lineTo(vx, h);
    ctx.stroke();
    const vy = worldToScreen({ x: 0, y: y0 + i }, camera, w, h).y;
    ctx.beginPath();
    ctx.moveTo(0, vy);
    ctx.lineTo(w, vy);
    ctx.stroke();
  }
}

function drawObstacles(
  ctx: CanvasRenderingContext2D,
  obstacles: CourseRect[],
  hot: CourseRect[],
  camera: Camera,
  w: number,
  h: number,
) {
  for (const rect of obstacles) {
    const warning = hot.includes(rect);
    tracePolygon(ctx, rectCorners(rect), camera, w, h);
    ctx.fillStyle = warning ? COLORS.warning : COLORS.obstacle;
    ctx.globalAlpha = warning ? 0.8 : 0.6;
    ctx.fill();
    ctx.globalAlpha = 1.0;
    ctx.strokeStyle = warning ? COLORS.warning : COLORS.obstacleEdge;
    ctx.lineWidth = 2;
    ctx.stroke();
  }
}

function drawRobot(
  ctx: CanvasRenderingContext2D,
  state: StateMessage,
  warning: boolean,
  camera: Camera,
  w: number,
  h: number,
) {
  // body outline spanning the two groups at the live spacing
  tracePolygon(ctx, rectCorners(robotFootprint(state)), camera, w, h);
  ctx.strokeStyle = warning ? COLORS.warning : COLORS.body;
  ctx.lineWidth = 2;
  ctx.stroke();

  for (const center of groupCenters(state)) {
    const group: CourseRect = {
      x: center.x,
      y: center.y,
      phi: state.phi,
      width: WHEEL_GROUP_LENGTH,
      height: WHEEL_GROUP_WIDTH,
    };
    tracePolygon(ctx, rectCorners(group), camera, w, h);
    ctx.fillStyle = COLORS.group;
    ctx.globalAlpha = 0.9;
    ctx.fill();
    ctx.globalAlpha = 1.0;
  }

  // heading tick
  const nose = {
    x: state.x + Math.cos(state.phi) * 0.25,
    y: state.y + Math.sin(state.phi) * 0.25,
  };
  const a = worldToScreen({ x: state.x, y: state.y }, camera, w, h);
  const b = worldToScreen(nose, camera, w, h);
  ctx.strokeStyle = COLORS.body;
  ctx.beginPath();
  ctx.moveTo(a.x, a.y);
  ctx.lineTo(b.x, b.y);
  ctx.stroke();
}

function drawTrail(ctx: CanvasRenderingContext2D, points: Point[], camera: Camera, w: number, h: number) {
  if (points.length < 2) return;
  ctx.strokeStyle = COLORS.trail;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  points.forEach((point, i) => {
    const p = worldToScreen(point, camera, w, h);
    if (i === 0) ctx.moveTo(p.x, p.y);
    else ctx.lineTo(p.x, p.y);
  });
  ctx.stroke();
}

export function renderFrame(
  ctx: CanvasRenderingContext2D,
  view: ViewState,
  course: Course | null,
  nowWall: number,
): void {
  const w = ctx.canvas.width;
  const h = ctx.canvas.height;
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, w, h);
  drawGrid(ctx, view.camera, w, h);

  const obstacles = course ? course.obstacles : [];
  const state = view.lastState;
  const hot = state ? collidingObstacles(state, obstacles) : [];
  drawObstacles(ctx, obstacles, hot, view.camera, w, h);
  drawTrail(ctx, view.trail.ordered(), view.camera, w, h);
  if (state) drawRobot(ctx, state, hot.length > 0, view.camera, w, h);

  ctx.fillStyle = COLORS.text;
  ctx.font = "13px monospace";
  if (state) {
    const lines = [
      `d     ${state.d.toFixed(3)} m`,
      `vx vy ${state.vx.toFixed(2)} ${state.vy.toFixed(2)} m/s`,
      `wz    ${state.wz.toFixed(2)} rad/s`,
      `ddot  ${state.ddot.toFixed(3)} m/s`,
      `pitch ${((state.pitch * 180) / Math.PI).toFixed(1)} deg`,
      `t     ${state.t.toFixed(1)} s`,
    ];
    lines.forEach((line, i) => ctx.fillText(line, 12, 22 + 16 * i));
  }
  if (hot.length > 0) {
    ctx.fillStyle = COLORS.warning;
    ctx.fillText("OBSTACLE CONTACT", 12, h - 40);
  }
  if (view.stale(nowWall)) {
    ctx.fillStyle = COLORS.warning;
    ctx.fillText("STALE DATA - no state for > 1 s", 12, h - 22);
  } else {
    ctx.fillStyle = COLORS.text;
    ctx.fillText(view.connection + (view.note ? `  ${view.note}` : ""), 12, h - 22);
  }
}
