/** Leading-plus-trailing rate gate.
 *
 *  The first push in a quiet period fires immediately (so the band reacts
 *  the instant a drag starts); after that, at most one fire per interval,
 *  and the newest value always wins the trailing slot. Over a burst of
 *  duration D this fires at most ceil(D / interval) + 1 times.
 */
export class Throttle<T> {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private lastFire = Number.NEGATIVE_INFINITY;
  private pending: T | null = null;
  private hasPending = false;

  constructor(
    private readonly intervalMs: number,
    private readonly fn: (value: T) => void,
  ) {}

  push(value: T): void {
    const now = Date.now();
    if (this.timer === null && now - this.lastFire >= this.intervalMs) {
      this.lastFire = now;
      this.fn(value);
      return;
    }
    this.pending = value;
    this.hasPending = true;
    if (this.timer === null) {
      const wait = Math.max(0, this.lastFire + this.intervalMs - now);
      this.timer = setTimeout(() => this.fireTrailing(), wait);
    }
  }

  private fireTrailing(): void {
    this.timer = null;
    if (!this.hasPending) return;
    const value = this.pending as T;
    this.pending = null;
    this.hasPending = false;
    this.lastFire = Date.now();
    this.fn(value);
  }

  /** Drop whatever is waiting; the next push fires on its own schedule. */
  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.pending = null;
    this.hasPending = false;
  }
}
