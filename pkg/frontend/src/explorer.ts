/** Live contrast exploration: sliders -> debounced regeneration.
 *
 * Invariants the controller maintains:
 *  - slider values are clamped to the ranges advertised by /model/info,
 *    so no request ever carries an out-of-range condition;
 *  - at most one generate request is in flight; edits made while one is
 *    pending coalesce into a single follow-up request;
 *  - responses older than the latest issued request are discarded, so
 *    the displayed image always reflects the newest completed state.
 */

import type { ApiClient } from "./api.js";
import type { ConditionSpace, GenerateResponse } from "./types.js";

export interface ExplorerState {
  tr_ms: number;
  te_ms: number;
  orientation: string;
  seed: number;
  pending: boolean;
  lastResponse: GenerateResponse | null;
  error: string | null;
}

export type NumericField = "tr_ms" | "te_ms" | "seed";

export interface ExplorerOptions {
  debounceMs?: number;
}

export function clamp(value: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, value));
}

export class ExplorerController {
  readonly state: ExplorerState;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private latestRequestId = 0;
  private inFlight = false;
  private followUp = false;
  private readonly debounceMs: number;

  constructor(
    private api: ApiClient,
    readonly space: ConditionSpace,
    opts: ExplorerOptions = {},
    private onChange: (state: ExplorerState) => void = () => {},
  ) {
    this.debounceMs = opts.debounceMs ?? 150;
    this.state = {
      tr_ms: (space.tr_range[0] + space.tr_range[1]) / 2,
      te_ms: (space.te_range[0] + space.te_range[1]) / 2,
      orientation: space.orientations[0],
      seed: 0,
      pending: false,
      lastResponse: null,
      error: null,
    };
  }

  /** Clamp-and-set a numeric field; schedules a debounced regeneration. */
  setField(field: NumericField, value: number): void {
    if (!Number.isFinite(value)) {
      return;
    }
    if (field === "tr_ms") {
      this.state.tr_ms = clamp(value, this.space.tr_range[0], this.space.tr_range[1]);
    } else if (field === "te_ms") {
      this.state.te_ms = clamp(value, this.space.te_range[0], this.space.te_range[1]);
    } else {
      this.state.seed = Math.round(value);
    }
    this.onChange(this.state);
    this.schedule();
  }

  setOrientation(orientation: string): void {
    if (!this.space.orientations.includes(orientation)) {
      return;
    }
    this.state.orientation = orientation;
    this.onChange(this.state);
    this.schedule();
  }

  /** Force an immediate regeneration (initial render, retry button). */
  regenerate(): void {
    this.schedule(0);
  }

  private schedule(delay: number = this.debounceMs): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.fire();
    }, delay);
  }

  private async fire(): Promise<void> {
    if (this.inFlight) {
      this.followUp = true; // coalesce; re-fire when the current one settles
      return;
    }
    const requestId = ++this.latestRequestId;
    this.inFlight = true;
    this.state.pending = true;
    this.onChange(this.state);
    try {
      const response = await this.api.generate({
        condition: {
          tr_ms: this.state.tr_ms,
          te_ms: this.state.te_ms,
          orientation: this.state.orientation,
        },
        seed: this.state.seed,
        count: 1,
      });
      if (requestId === this.latestRequestId) {
        this.state.lastResponse = response;
        this.state.error = null;
      }
    } catch (err) {
      if (requestId === this.latestRequestId) {
        this.state.error = err instanceof Error ? err.message : String(err);
      }
    } finally {
      this.inFlight = false;
      this.state.pending = this.followUp;
      this.onChange(this.state);
      if (this.followUp) {
        this.followUp = false;
        void this.fire();
      }
    }
  }
}
