/**
 * Fixed-step scheduler for the simulation loop.
 *
 * The stepper must advance at exactly `rate` ticks per second of wall
 * time regardless of render cadence, so tick counts are derived from
 * absolute elapsed time rather than accumulated per-frame deltas:
 * after T seconds the total is floor(T * rate) within one tick, with
 * no long-run drift however irregular the frame callbacks are.
 */

export class FixedStepAccumulator {
  readonly rate: number;
  private startS: number | null = null;
  private done = 0;

  constructor(rate: number) {
    if (!Number.isFinite(rate) || rate <= 0) {
      throw new RangeError(`rate must be > 0, got ${rate}`);
    }
    this.rate = rate;
  }

  /** Seconds per tick. */
  get dt(): number {
    return 1.0 / this.rate;
  }

  /** Total ticks issued so far. */
  get ticksDone(): number {
    return this.done;
  }

  /** Wall-clock time of the first update, or null before it. */
  get startedAt(): number | null {
    return this.startS;
  }

  /**
   * Number of ticks to run for wall-clock time `nowS` (seconds). The
   * first call sets the origin and returns 0. The epsilon keeps a
   * nominally exact elapsed time (say 2.00 s at 100 Hz) from losing
   * its final tick to representation error.
   */
  update(nowS: number): number {
    if (!Number.isFinite(nowS)) {
      throw new RangeError(`time must be finite, got ${nowS}`);
    }
    if (this.startS === null) {
      this.startS = nowS;
      return 0;
    }
    const elapsed = nowS - this.startS;
    if (elapsed < 0) {
      return 0;
    }
    const due = Math.floor(elapsed * this.rate + 1e-9);
    const n = due - this.done;
    if (n <= 0) {
      return 0;
    }
    this.done = due;
    return n;
  }

  /** Forget the origin; the next update starts a fresh clock. */
  reset(): void {
    this.startS = null;
    this.done = 0;
  }
}
