/** Forced-balance labeling panel.
 *
 * A grid of six tiles is labeled real/synthetic tile by tile; submit is
 * enabled only when exactly half carry each label, mirroring the
 * server-side balance rule. A server rejection (balance race or stale
 * session) re-displays the grid with a message and keeps the labels.
 */

import { ApiError, type ApiClient } from "./api.js";
import type { TuringGridView, TuringLabel } from "./types.js";

export interface TuringPanelState {
  grid: TuringGridView | null;
  labels: (TuringLabel | null)[];
  message: string | null;
  finished: boolean;
  submitting: boolean;
}

export class TuringPanel {
  readonly state: TuringPanelState = {
    grid: null,
    labels: [],
    message: null,
    finished: false,
    submitting: false,
  };

  constructor(
    private api: ApiClient,
    private sessionId: string,
    private reader: string,
    private onChange: (state: TuringPanelState) => void = () => {},
  ) {}

  async loadGrid(index: number): Promise<void> {
    const grid = await this.api.turingGrid(this.sessionId, index);
    this.state.grid = grid;
    this.state.labels = new Array<TuringLabel | null>(grid.items.length).fill(null);
    this.state.message = null;
    this.onChange(this.state);
  }

  /** Left click marks real, right click synthetic; repeat clears. */
  toggle(tile: number, label: TuringLabel): void {
    if (!this.state.grid || tile < 0 || tile >= this.state.labels.length) {
      return;
    }
    this.state.labels[tile] = this.state.labels[tile] === label ? null : label;
    this.onChange(this.state);
  }

  counts(): { real: number; synthetic: number } {
    return {
      real: this.state.labels.filter((l) => l === "real").length,
      synthetic: this.state.labels.filter((l) => l === "synthetic").length,
    };
  }

  submitEnabled(): boolean {
    if (!this.state.grid) {
      return false;
    }
    const half = this.state.grid.items.length / 2;
    const { real, synthetic } = this.counts();
    return real === half && synthetic === half;
  }

  async submit(): Promise<boolean> {
    if (!this.state.grid || !this.submitEnabled() || this.state.submitting) {
      return false;
    }
    this.state.submitting = true;
    this.onChange(this.state);
    try {
      const result = await this.api.submitLabels(
        this.sessionId,
        this.state.grid.index,
        this.reader,
        this.state.labels as TuringLabel[],
      );
      if (result.next_grid === null) {
        this.state.finished = true;
        this.state.grid = null;
        this.state.labels = [];
        this.onChange(this.state);
      } else {
        await this.loadGrid(result.next_grid);
      }
      return true;
    } catch (err) {
      this.state.message =
        err instanceof ApiError ? err.body.message : "submission failed, try again";
      this.onChange(this.state);
      return false;
    } finally {
      this.state.submitting = false;
      this.onChange(this.state);
    }
  }
}
