/**
 * Client wiring: WebSocket to the service, keyboard capture, the 50 Hz
 * command poll, and the render loop. Single event loop, no shared state
 * beyond the view object.
 */

import { InputTracker } from "./input.js";
import { asCourse, asErrorMessage, asStateMessage, type Course } from "./messages.js";
import { renderFrame } from "./render.js";
import { ViewState } from "./view.js";

const POLL_PERIOD_S = 0.02; // 50 Hz command stream while driving

function nowSeconds(): number {
  return performance.now() / 1000;
}

function start(): void {
  const canvas = document.getElementById("scene") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d")!;
  const view = new ViewState();
  const input = new InputTracker();
  let course: Course | null = null;
  let follow = true;

  fetch("/course")
    .then((resp) => resp.json())
    .then((raw) => {
      course = asCourse(raw);
    })
    .catch(() => {
      view.note = "no course data";
    });

  const ws = new WebSocket(`ws://${location.host}/ws`);
  ws.onopen = () => {
    view.connection = "connected";
  };
  ws.onclose = () => {
    view.connection = "closed";
  };
  ws.onerror = () => {
    view.connection = "closed";
  };
  ws.onmessage = (event: MessageEvent) => {
    let parsed: unknown;
    try {
      parsed = JSON.parse(event.data as string);
    } catch {
      return;
    }
    const state = asStateMessage(parsed);
    if (state) {
      view.accept(state, nowSeconds());
      if (follow) view.follow();
      return;
    }
    const error = asErrorMessage(parsed);
    if (error) view.note = error.error;
  };

  window.addEventListener("keydown", (event) => {
    if (event.repeat) return;
    input.press(event.key);
  });
  window.addEventListener("keyup", (event) => input.release(event.key));
  window.addEventListener("blur", () => input.releaseAll());

  canvas.addEventListener("wheel", (event) => {
    event.preventDefault();
    view.zoom(event.deltaY < 0 ? 1.15 : 1 / 1.15);
  });
  let dragging = false;
  canvas.addEventListener("mousedown", () => {
    dragging = true;
    follow = false;
  });
  window.addEventListener("mouseup", () => {
    dragging = false;
  });
  window.addEventListener("mousemove", (event) => {
    if (dragging) view.pan(event.movementX, event.movementY);
  });
  window.addEventListener("keydown", (event) => {
    if (event.key === "f") follow = true;
  });

  // command poll: send only while connected; released keys already map
  // to a zero command on the next poll
  setInterval(() => {
    if (ws.readyState !== WebSocket.OPEN) return;
    ws.send(JSON.stringify(input.poll(POLL_PERIOD_S)));
  }, POLL_PERIOD_S * 1000);

  const paint = () => {
    renderFrame(ctx, view, course, nowSeconds());
    requestAnimationFrame(paint);
  };
  paint();
}

window.addEventListener("DOMContentLoaded", start);
