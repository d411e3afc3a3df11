// Wire payloads of the trampkit HTTP API. The UI renders these as-is;
// every displayed number comes from the server.

export interface CatalogRow {
  code: string;
  name: string;
  tariff: number;
  takeoff: string;
  landing: string;
  shape: string | null;
  somersault_quarters: number;
  twist_halves: number;
}

export interface LineInfo {
  top_row: number;
  source: string;
}

export interface RoutineSummary {
  id: string;
  fps: number;
  line: LineInfo;
  labels: Record<string, string>;
  revision: number;
}

export interface Segment {
  start: number;
  end: number;
  apex: number;
  apex_height: number;
  is_routine_jump: boolean;
  airborne: [number, number] | null;
}

export interface SegmentsDoc {
  routine_id: string;
  fps: number;
  line_row: number;
  contact?: boolean[];
  segments: Segment[];
}

export interface FrameMeta {
  frame: number;
  origin: [number, number];
  centroid: [number, number];
  bbox: [number, number, number, number];
  hull: [number, number][];
  in_contact: boolean;
}

export interface RankedMatch {
  entry_id: string;
  code: string;
  mse: number;
}

export interface ClassifyResult {
  best: string;
  best_mse: number;
  ranked: RankedMatch[];
  per_feature: number[];
}

export interface TrajectoryDoc {
  skill_ref: string;
  fps: number;
  angles: number[][];
}

export interface ReferenceEntry {
  entry_id: string;
  code: string;
  routine_id: string | null;
  athlete_id: string | null;
  created_at: string | null;
  trajectory: TrajectoryDoc;
}

export interface ReferenceSetDoc {
  version: number;
  next_id: number;
  revision: number;
  entries: ReferenceEntry[];
}

export interface ConfusionDoc {
  labels: string[];
  counts: number[][];
}

export interface EvalReport {
  mean_accuracy: number;
  per_iteration: number[];
  included_codes: string[];
  confusion: ConfusionDoc;
  config: Record<string, unknown>;
}

export const FEATURE_NAMES = [
  "R elbow", "L elbow", "R shoulder", "L shoulder",
  "R hip", "L hip", "R knee", "L knee",
  "R leg", "L leg", "torso", "twist",
] as const;
