import { describe, expect, it } from "vitest";

import { DEFAULT_LIMITS, InputTracker } from "./input.js";

const DT = 0.02;

describe("input mapping", () => {
  it("sends all-zero commands when nothing is pressed", () => {
    const tracker = new InputTracker();
    const cmd = tracker.poll(DT);
    expect(cmd).toMatchObject({ type: "cmd", vx: 0, vy: 0, wz: 0, ddot: 0 });
  });

  it("ramps a held key to the channel limit", () => {
    // ramp 1 unit/s, limit 0.5: half a second of polls saturates vx
    const tracker = new InputTracker(undefined, undefined, 1.0);
    tracker.press("w");
    let cmd = tracker.poll(DT);
    expect(cmd.vx).toBeCloseTo(1.0 * DT, 10);
    for (let i = 0; i < 24; i++) cmd = tracker.poll(DT);
    expect(cmd.vx).toBeCloseTo(DEFAULT_LIMITS.vx, 10);
    // further polls stay clamped
    cmd = tracker.poll(DT);
    expect(cmd.vx).toBe(DEFAULT_LIMITS.vx);
  });

  it("zeroes a channel on the first poll after release", () => {
    const tracker = new InputTracker();
    tracker.press("w");
    for (let i = 0; i < 50; i++) tracker.poll(DT);
    tracker.release("w");
    const cmd = tracker.poll(DT);
    expect(cmd.vx).toBe(0);
  });

  it("zeroes everything on releaseAll within one poll", () => {
    const tracker = new InputTracker();
    for (const key of ["w", "a", "q", "x"]) tracker.press(key);
    for (let i = 0; i < 50; i++) tracker.poll(DT);
    tracker.releaseAll();
    const cmd = tracker.poll(DT);
    expect([cmd.vx, cmd.vy, cmd.wz, cmd.ddot]).toEqual([0, 0, 0, 0]);
  });

  it("drives independent channels simultaneously", () => {
    const tracker = new InputTracker();
    tracker.press("w");
    tracker.press("q");
    for (let i = 0; i < 100; i++) tracker.poll(DT);
    const cmd = tracker.poll(DT);
    expect(cmd.vx).toBeGreaterThan(0);
    expect(cmd.wz).toBeGreaterThan(0);
    expect(cmd.vy).toBe(0);
  });

  it("sums opposing bindings to zero", () => {
    const tracker = new InputTracker();
    tracker.press("w");
    tracker.press("s");
    for (let i = 0; i < 20; i++) tracker.poll(DT);
    expect(tracker.poll(DT).vx).toBe(0);
  });

  it("maps the stance keys with narrow negative, widen positive", () => {
    const tracker = new InputTracker();
    tracker.press("z");
    for (let i = 0; i < 100; i++) tracker.poll(DT);
    expect(tracker.poll(DT).ddot).toBeLessThan(0);
    tracker.releaseAll();
    tracker.press("x");
    for (let i = 0; i < 100; i++) tracker.poll(DT);
    expect(tracker.poll(DT).ddot).toBeGreaterThan(0);
  });

  it("increments the sequence number monotonically", () => {
    const tracker = new InputTracker();
    let previous = tracker.poll(DT).seq;
    for (let i = 0; i < 100; i++) {
      const seq = tracker.poll(DT).seq;
      expect(seq).toBeGreaterThan(previous);
      previous = seq;
    }
  });
});
