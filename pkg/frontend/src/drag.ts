/**
 * Pointer-to-target plumbing: map canvas coordinates to the world frame and
 * throttle the stream to at most maxRate targets per second, always keeping
 * the most recent position (trailing send).
 */

export interface ThrottleOptions {
  maxRate: number;
  now?: () => number;
  schedule?: (fn: () => void, delayMs: number) => void;
}

export class TargetThrottle {
  private readonly minGapMs: number;
  private readonly now: () => number;
  private readonly schedule: (fn: () => void, delayMs: number) => void;
  private lastSent = -Infinity;
  private queued: number[] | null = null;
  private timerArmed = false;
  sent = 0;
  dropped = 0;

  constructor(
    private readonly emit: (point: number[]) => void,
    options: ThrottleOptions,
  ) {
    this.minGapMs = 1000 / options.maxRate;
    this.now = options.now ?? (() => Date.now());
    this.schedule = options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
  }

  push(point: number[]): void {
    const t = this.now();
    if (t - this.lastSent >= this.minGapMs) {
      this.lastSent = t;
      this.sent += 1;
      this.emit(point);
      return;
    }
    if (this.queued !== null) this.dropped += 1;
    this.queued = point;
    if (!this.timerArmed) {
      this.timerArmed = true;
      this.schedule(() => this.flush(), this.minGapMs - (t - this.lastSent));
    }
  }

  flush(): void {
    this.timerArmed = false;
    if (this.queued === null) return;
    const point = this.queued;
    this.queued = null;
    this.lastSent = this.now();
    this.sent += 1;
    this.emit(point);
  }
}
