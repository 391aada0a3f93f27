/** Wire types mirroring the inference service's JSON schemas. */

export interface Condition {
  tr_ms: number;
  te_ms: number;
  orientation: string;
}

export interface ConditionSpace {
  tr_range: [number, number];
  te_range: [number, number];
  orientations: string[];
}

export interface ModelInfo {
  model_version: string;
  checkpoint_hash: string;
  network: {
    latent_dim: number;
    base_resolution: number;
    final_resolution: number;
    resolution: number;
  };
  condition_space: ConditionSpace;
  training: { images_seen: number | null; step: number | null };
}

export interface GenerateRequest {
  condition: Condition;
  seed?: number;
  latent?: number[];
  count?: number;
}

export interface GenerateResponse {
  images: string[]; // base64 16-bit grayscale PNG
  readback: Condition[];
  model_version: string;
}

export interface GridRequest {
  tr_values: number[];
  te_values: number[];
  orientation: string;
  seed: number;
}

export interface GridRow {
  row: number;
  col: number;
  intended_tr_ms: number;
  intended_te_ms: number;
  intended_orientation: string;
  readback_tr_ms: number;
  readback_te_ms: number;
  readback_orientation: string;
}

export interface GridResponse {
  montage: string;
  rows: GridRow[];
  model_version: string;
}

export interface TuringItemView {
  item_id: string;
  ref: string;
  tr_ms: number;
  te_ms: number;
  orientation: string;
}

export interface TuringGridView {
  index: number;
  count: number;
  items: TuringItemView[];
}

export interface LabelSubmitResponse {
  accepted: boolean;
  next_grid: number | null;
}

export interface ApiErrorBody {
  error: string;
  message: string;
  field?: string;
}

export type TuringLabel = "real" | "synthetic";
