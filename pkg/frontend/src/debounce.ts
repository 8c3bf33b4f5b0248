/** Trailing rate limiter: at most one emission per interval, always ending
 * with the latest value. A continuous gesture therefore emits at most
 * duration/interval commands (the camera-sync contract is <= 10/s). */

export class RateLimiter<T> {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private lastEmit = Number.NEGATIVE_INFINITY;
  private queued: T | undefined;
  emitted = 0;

  constructor(
    private readonly intervalMs: number,
    private readonly emit: (value: T) => void,
    private readonly now: () => number = () => Date.now(),
  ) {}

  push(value: T): void {
    this.queued = value;
    if (this.timer !== null) return; // an emission is already scheduled
    // Trailing-only: the flush lands intervalMs after the later of the last
    // emission and this push, so any window of length T sees at most
    // T/intervalMs emissions (a leading emit would overshoot by one).
    const since = this.now() - this.lastEmit;
    const wait = since >= this.intervalMs
      ? this.intervalMs
      : this.intervalMs - since;
    this.timer = setTimeout(() => this.flush(), wait);
  }

  private flush(): void {
    this.timer = null;
    if (this.queued === undefined) return;
    const value = this.queued;
    this.queued = undefined;
    this.lastEmit = this.now();
    this.emitted += 1;
    this.emit(value);
  }

  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.queued = undefined;
  }
}
