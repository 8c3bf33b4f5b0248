/** Shapes of the manager HTTP API payloads (see docs/protocol.md). */

export interface GridShape {
  columns: number;
  rows: number;
}

export interface CameraValues {
  azimuth: number;
  elevation: number;
  roll: number;
  zoom: number;
  pan: [number, number];
}

export interface RenderParamValues {
  sample_step: number;
  opacity_scale: number;
  colour_map: string;
  clip_lo: number;
  clip_hi: number;
  iso_level: number;
  mode: "volume" | "isosurface";
}

export interface StateSnapshot {
  grid: GridShape;
  occupancy: Record<string, string>;
  selection: string[];
  params: RenderParamValues;
  camera: CameraValues;
  sort: [string, string][];
  provenance: Record<string, { path: string; seq: number }>;
  seq: number;
  state_hash: string;
  checkpoints: Record<string, number>;
}

export interface CatalogEntry {
  id: string;
  path: string;
  values: Record<string, string>;
}

export interface CatalogPayload {
  columns: string[];
  numeric_columns: string[];
  entries: CatalogEntry[];
}

export interface HistogramPayload {
  bin_count: number;
  edges: number[];
  counts: number[];
}

export interface HistogramResult {
  ok: boolean;
  slot?: string;
  id?: string;
  histogram?: HistogramPayload;
  error?: ApiError;
}

export interface ScatterPoint {
  slot: string;
  id: string;
  x: number | string | null;
  y: number;
}

export interface ScatterResult {
  ok: boolean;
  x_field?: string;
  y_stat?: string;
  points: ScatterPoint[];
  warnings: { slot: string; id: string; code: string; message: string }[];
  error?: ApiError;
}

export interface ApiError {
  code: string;
  message: string;
}

export interface CommandResult {
  ok: boolean;
  seq?: number;
  state_hash?: string;
  warnings?: unknown[];
  error?: ApiError;
}

export type SortDirection = "ascending" | "descending";
export type SortSpec = [string, SortDirection][];

/** Column letters for a 0-based index: A..Z, AA.. (matches the manager). */
export function columnLetters(column: number): string {
  let letters = "";
  let n = column;
  for (;;) {
    letters = String.fromCharCode(65 + (n % 26)) + letters;
    n = Math.floor(n / 26) - 1;
    if (n < 0) return letters;
  }
}

export function slotLabel(column: number, row: number): string {
  return `${columnLetters(column)}${row}`;
}

/** Every slot label in column-first, top-down order. */
export function allSlots(grid: GridShape): string[] {
  const out: string[] = [];
  for (let c = 0; c < grid.columns; c++) {
    for (let r = 1; r <= grid.rows; r++) {
      out.push(slotLabel(c, r));
    }
  }
  return out;
}
