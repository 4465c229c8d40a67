/**
 * Interaction telemetry buffer.
 *
 * Pointer moves are throttled to ~30 Hz (raw timestamps preserved for
 * the samples that are kept); key events carry timing only, never the
 * key identity. All timestamps are seconds relative to challenge
 * receipt, so the buffer is reset when a new challenge arrives.
 */

import type { TelemetryEvent } from "./api.js";

export type NowFn = () => number; // seconds, monotonic

const defaultNow: NowFn = () =>
  (typeof performance !== "undefined" ? performance.now() : Date.now()) / 1000;

export class TelemetryRecorder {
  private events: TelemetryEvent[] = [];
  private t0 = 0;
  private started = false;
  private lastMoveT = -Infinity;
  private readonly minMoveGap: number;

  constructor(
    private readonly now: NowFn = defaultNow,
    sampleHz = 30,
  ) {
    this.minMoveGap = 1 / sampleHz;
  }

  /** Mark challenge receipt; clears any buffered events. */
  start(): void {
    this.events = [];
    this.t0 = this.now();
    this.started = true;
    this.lastMoveT = -Infinity;
  }

  get active(): boolean {
    return this.started;
  }

  private rel(): number {
    return Math.max(0, this.now() - this.t0);
  }

  pointerMove(x: number, y: number): void {
    if (!this.started) return;
    const t = this.rel();
    if (t - this.lastMoveT < this.minMoveGap) return;
    this.lastMoveT = t;
    this.events.push({ kind: "pointer_move", t, x, y });
  }

  click(x: number, y: number): void {
    if (!this.started) return;
    this.events.push({ kind: "click", t: this.rel(), x, y });
  }

  /** Timing-only keystroke marker; deliberately takes no key data. */
  keyTiming(): void {
    if (!this.started) return;
    this.events.push({ kind: "key", t: this.rel() });
  }

  /** Buffered events plus the closing submit marker. */
  snapshotWithSubmit(): TelemetryEvent[] {
    const out = this.events.slice();
    out.push({ kind: "submit", t: this.rel() });
    return out;
  }

  get size(): number {
    return this.events.length;
  }
}
