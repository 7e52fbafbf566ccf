/** Payload shapes returned by the query service (/api/v1). */

export interface MetaPayload {
  format_version: number;
  seed: number;
  theta: number;
  scan: { min_side: number; max_side: number };
  viewpoints: string[];
  item_count: number;
}

export interface MapSummary {
  id: string;
  width: number;
  height: number;
  chosen_size: number;
  non_empty_nodes: number;
  projected_items: number;
}

export interface NodePayload {
  index: number;
  a: number;
  b: number;
  label: string | null;
  member_count: number;
  member_items: string[];
}

export interface AreaPayload {
  area_id: number;
  label: string;
  nodes: number[];
  member_items: string[];
}

export interface MapDetail {
  id: string;
  width: number;
  height: number;
  nodes: NodePayload[];
  areas: AreaPayload[];
}

export interface ConsistencyPayload {
  viewpoints: string[];
  values: number[][];
}

export interface SourceDetailPayload {
  targets: number[][];
  dispersion: number;
  term: number;
}

export interface ConsistencyDetailPayload {
  source: string;
  target: string;
  value: number;
  counted_sources: number[];
  excluded_sources: number[];
  per_source: Record<string, SourceDetailPayload>;
}

export interface ActivityEntry {
  node: number;
  a: number;
  b: number;
  activity: number;
  posterior: number;
}

export interface PropagationPayload {
  source_map: string | null;
  source_nodes: number[];
  target_map: string;
  has_carriers: boolean;
  carriers: string[];
  activity: ActivityEntry[];
  activity_total: number;
  theta: number;
  focus: number[];
}

export interface ChainPayload {
  theta: number;
  steps: PropagationPayload[];
}

export interface PropagateRequest {
  source_map: string;
  target_map: string;
  nodes?: number[];
  area?: number;
  theta?: number;
}

export interface ChainStepRequest {
  source_map: string;
  target_map: string;
  nodes?: number[];
  area?: number;
}

export interface ChainRequest {
  steps: ChainStepRequest[];
  theta?: number;
}
