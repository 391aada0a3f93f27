/** Typed client for the inference service.
 *
 * The fetch implementation is injected so tests can substitute a mock
 * transport and inspect every request the UI issues.
 */

import type {
  ApiErrorBody,
  GenerateRequest,
  GenerateResponse,
  GridRequest,
  GridResponse,
  LabelSubmitResponse,
  ModelInfo,
  TuringGridView,
  TuringLabel,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ApiErrorBody,
  ) {
    super(body.message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) {
      let parsed: ApiErrorBody;
      try {
        parsed = (await resp.json()) as ApiErrorBody;
      } catch {
        parsed = { error: "http_error", message: `HTTP ${resp.status}` };
      }
      throw new ApiError(resp.status, parsed);
    }
    return (await resp.json()) as T;
  }

  modelInfo(): Promise<ModelInfo> {
    return this.request("GET", "/model/info");
  }

  generate(req: GenerateRequest): Promise<GenerateResponse> {
    return this.request("POST", "/generate", req);
  }

  grid(req: GridRequest): Promise<GridResponse> {
    return this.request("POST", "/grid", req);
  }

  turingGrid(sessionId: string, index: number): Promise<TuringGridView> {
    return this.request("GET", `/turing/sessions/${sessionId}/grids/${index}`);
  }

  submitLabels(
    sessionId: string,
    index: number,
    reader: string,
    labels: TuringLabel[],
  ): Promise<LabelSubmitResponse> {
    return this.request("POST", `/turing/sessions/${sessionId}/grids/${index}/labels`, {
      reader,
      labels,
    });
  }
}
