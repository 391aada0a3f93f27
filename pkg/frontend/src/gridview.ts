/** Multi-tile interpolation view over the /grid endpoint.
 *
 * Value lists are validated against the advertised ranges before any
 * request leaves the client; violations surface inline instead of as a
 * server round trip.
 */

import { ApiError, type ApiClient } from "./api.js";
import type { ConditionSpace, GridResponse } from "./types.js";

export interface GridViewState {
  response: GridResponse | null;
  error: string | null;
  pending: boolean;
}

export function validateValues(
  values: number[],
  range: [number, number],
  label: string,
): string | null {
  if (values.length === 0) {
    return `${label}: provide at least one value`;
  }
  for (const v of values) {
    if (!Number.isFinite(v) || v < range[0] || v > range[1]) {
      return `${label}: ${v} outside [${range[0]}, ${range[1]}]`;
    }
  }
  return null;
}

export function parseValueList(raw: string): number[] {
  return raw
    .split(",")
    .map((s) => s.trim())
    .filter((s) => s.length > 0)
    .map(Number);
}

export class GridExplorer {
  readonly state: GridViewState = { response: null, error: null, pending: false };

  constructor(
    private api: ApiClient,
    private space: ConditionSpace,
    private onChange: (state: GridViewState) => void = () => {},
  ) {}

  async render(
    trValues: number[],
    teValues: number[],
    orientation: string,
    seed: number,
  ): Promise<void> {
    const problem =
      validateValues(trValues, this.space.tr_range, "TR") ??
      validateValues(teValues, this.space.te_range, "TE") ??
      (this.space.orientations.includes(orientation)
        ? null
        : `orientation: unknown ${orientation}`);
    if (problem) {
      this.state.error = problem;
      this.onChange(this.state);
      return;
    }
    this.state.pending = true;
    this.state.error = null;
    this.onChange(this.state);
    try {
      this.state.response = await this.api.grid({
        tr_values: trValues,
        te_values: teValues,
        orientation,
        seed,
      });
    } catch (err) {
      this.state.error =
        err instanceof ApiError ? err.body.message : "grid request failed";
    } finally {
      this.state.pending = false;
      this.onChange(this.state);
    }
  }
}
