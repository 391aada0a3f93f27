/** Request-logging mock transport standing in for the inference service. */

import type { FetchLike } from "../src/api.js";
import type { Condition, ConditionSpace, GenerateRequest } from "../src/types.js";

export const SPACE: ConditionSpace = {
  tr_range: [1800, 5000],
  te_range: [12, 50],
  orientations: ["coronal", "sagittal", "axial"],
};

export interface LoggedRequest {
  method: string;
  path: string;
  body: unknown;
}

export interface MockOptions {
  failGenerate?: boolean;
  deferGenerate?: boolean;
  gridCount?: number;
  rejectLabels?: boolean;
}

export class MockServer {
  log: LoggedRequest[] = [];
  pending: Array<() => void> = [];

  constructor(private opts: MockOptions = {}) {}

  /** Resolve all deferred generate responses (in arrival order). */
  release(): void {
    const waiting = this.pending;
    this.pending = [];
    for (const resolve of waiting) {
      resolve();
    }
  }

  get fetch(): FetchLike {
    return async (url: string, init?: RequestInit) => {
      const method = init?.method ?? "GET";
      const body = init?.body ? JSON.parse(init.body as string) : undefined;
      this.log.push({ method, path: url, body });

      if (url === "/generate" && method === "POST") {
        if (this.opts.failGenerate) {
          return json(500, { error: "boom", message: "server exploded" });
        }
        if (this.opts.deferGenerate) {
          await new Promise<void>((resolve) => this.pending.push(resolve));
        }
        const req = body as GenerateRequest;
        const readback: Condition = { ...req.condition };
        return json(200, {
          images: Array(req.count ?? 1).fill("cGF5bG9hZA=="),
          readback: Array(req.count ?? 1).fill(readback),
          model_version: "mock0001",
        });
      }

      if (url === "/grid" && method === "POST") {
        const { tr_values, te_values, orientation } = body as {
          tr_values: number[];
          te_values: number[];
          orientation: string;
        };
        const rows = tr_values.flatMap((tr, i) =>
          te_values.map((te, j) => ({
            row: i,
            col: j,
            intended_tr_ms: tr,
            intended_te_ms: te,
            intended_orientation: orientation,
            readback_tr_ms: tr + 10,
            readback_te_ms: te + 0.5,
            readback_orientation: orientation,
          })),
        );
        return json(200, { montage: "bW9udGFnZQ==", rows, model_version: "mock0001" });
      }

      const gridGet = url.match(/^\/turing\/sessions\/([^/]+)\/grids\/(\d+)$/);
      if (gridGet && method === "GET") {
        const index = Number(gridGet[2]);
        const count = this.opts.gridCount ?? 3;
        if (index >= count) {
          return json(404, { error: "unknown_grid", message: "no such grid" });
        }
        return json(200, {
          index,
          count,
          items: Array.from({ length: 6 }, (_, i) => ({
            item_id: `g${index}i${i}`,
            ref: `items/g${index}i${i}.png`,
            tr_ms: 2500,
            te_ms: 25,
            orientation: "coronal",
          })),
        });
      }

      const labelPost = url.match(/^\/turing\/sessions\/([^/]+)\/grids\/(\d+)\/labels$/);
      if (labelPost && method === "POST") {
        const { labels } = body as { labels: string[] };
        const balanced =
          labels.filter((l) => l === "real").length === labels.length / 2;
        if (!balanced || this.opts.rejectLabels) {
          return json(422, {
            error: "balance_violation",
            message: "labels must contain exactly 3 real and 3 synthetic",
            field: "labels",
          });
        }
        const index = Number(labelPost[2]);
        const count = this.opts.gridCount ?? 3;
        return json(200, { accepted: true, next_grid: index + 1 < count ? index + 1 : null });
      }

      return json(404, { error: "not_found", message: url });
    };
  }
}

function json(status: number, payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** Small deterministic PRNG for fuzzing. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}
