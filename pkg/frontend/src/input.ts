/**
 * Keyboard-to-command mapping.
 *
 * Each binding feeds one command channel with a sign. While a key is
 * held, its channel ramps toward the channel limit at the configured
 * rate; releasing every key on a channel zeroes it on the very next
 * poll. Simultaneous bindings on one channel sum before the clamp, so
 * opposing keys cancel. Every built command carries a strictly
 * increasing sequence number.
 */

import type { CommandMessage } from "./messages.js";

export type Channel = "vx" | "vy" | "wz" | "ddot";

export interface InputBinding {
  key: string;
  channel: Channel;
  sign: 1 | -1;
}

export interface ChannelLimits {
  vx: number;
  vy: number;
  wz: number;
  ddot: number;
}

/** W/S forward-back, A/D left-right, Q/E spin, Z/X narrow-widen. */
export const DEFAULT_BINDINGS: InputBinding[] = [
  { key: "w", channel: "vx", sign: 1 },
  { key: "s", channel: "vx", sign: -1 },
  { key: "a", channel: "vy", sign: 1 },
  { key: "d", channel: "vy", sign: -1 },
  { key: "q", channel: "wz", sign: 1 },
  { key: "e", channel: "wz", sign: -1 },
  { key: "z", channel: "ddot", sign: -1 },
  { key: "x", channel: "ddot", sign: 1 },
];

export const DEFAULT_LIMITS: ChannelLimits = { vx: 0.5, vy: 0.5, wz: 1.0, ddot: 0.2 };

const CHANNELS: Channel[] = ["vx", "vy", "wz", "ddot"];

function clamp(value: number, magnitude: number): number {
  return Math.max(-magnitude, Math.min(magnitude, value));
}

export class InputTracker {
  private pressed = new Set<string>();
  private current: Record<Channel, number> = { vx: 0, vy: 0, wz: 0, ddot: 0 };
  private seq = 0;

  constructor(
    private bindings: InputBinding[] = DEFAULT_BINDINGS,
    private limits: ChannelLimits = DEFAULT_LIMITS,
    private rampRate = 1.0, // command units per second toward the target
  ) {}

  press(key: string): void {
    this.pressed.add(key.toLowerCase());
  }

  release(key: string): void {
    this.pressed.delete(key.toLowerCase());
  }

  releaseAll(): void {
    this.pressed.clear();
  }

  get anyPressed(): boolean {
    return this.pressed.size > 0;
  }

  /** Target value of one channel from the currently held keys. */
  private target(channel: Channel): number {
    let sum = 0;
    for (const binding of this.bindings) {
      if (binding.channel === channel && this.pressed.has(binding.key)) {
        sum += binding.sign * this.limits[channel];
      }
    }
    return clamp(sum, this.limits[channel]);
  }

  /**
   * Advance one poll period and build the command to send.
   * Held channels ramp; released channels snap to zero immediately.
   */
  poll(dt: number): CommandMessage {
    for (const channel of CHANNELS) {
      const target = this.target(channel);
      if (target === 0) {
        this.current[channel] = 0;
      } else {
        const step = this.rampRate * dt;
        const delta = clamp(target - this.current[channel], step);
        this.current[channel] = clamp(this.current[channel] + delta, this.limits[channel]);
      }
    }
    this.seq += 1;
    return {
      type: "cmd",
      vx: this.current.vx,
      vy: this.current.vy,
      wz: this.current.wz,
      ddot: this.current.ddot,
      seq: this.seq,
    };
  }
}
