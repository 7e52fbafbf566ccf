/**
 * Application state and its URL round trip.
 *
 * Everything an analyst set up (active map, selection, target, threshold,
 * chain history) serializes into the query string, so any analysis step is
 * shareable and replayable by opening the link.
 */

import type { ChainStepRequest } from "./types.js";

export interface Selection {
  nodes?: number[];
  area?: number;
}

export interface AppState {
  map: string | null;
  target: string | null;
  selection: Selection | null;
  theta: number;
  chain: ChainStepRequest[];
}

export const DEFAULT_THETA = 0.1;

export function initialState(): AppState {
  return { map: null, target: null, selection: null, theta: DEFAULT_THETA, chain: [] };
}

export function toQuery(state: AppState): string {
  const params = new URLSearchParams();
  if (state.map) params.set("map", state.map);
  if (state.target) params.set("target", state.target);
  if (state.selection?.nodes?.length) {
    params.set("nodes", state.selection.nodes.join(","));
  }
  if (state.selection?.area !== undefined && state.selection.area !== null) {
    params.set("area", String(state.selection.area));
  }
  if (state.theta !== DEFAULT_THETA) params.set("theta", String(state.theta));
  if (state.chain.length) params.set("chain", JSON.stringify(state.chain));
  return params.toString();
}

export function fromQuery(query: string): AppState {
  const params = new URLSearchParams(query);
  const state = initialState();
  state.map = params.get("map");
  state.target = params.get("target");
  const nodes = params.get("nodes");
  const area = params.get("area");
  if (nodes !== null) {
    state.selection = {
      nodes: nodes.split(",").filter((s) => s.length).map((s) => parseInt(s, 10)),
    };
  } else if (area !== null) {
    state.selection = { area: parseInt(area, 10) };
  }
  const theta = params.get("theta");
  if (theta !== null) state.theta = parseFloat(theta);
  const chain = params.get("chain");
  if (chain !== null) {
    try {
      state.chain = JSON.parse(chain) as ChainStepRequest[];
    } catch {
      state.chain = [];
    }
  }
  return state;
}
