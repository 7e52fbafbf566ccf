/**
 * Browser entry point: left rail = map tabs, center = active grid,
 * right rail = propagation/chain controls, bottom = consistency heatmap.
 *
 * The service base defaults to the local query service and can be
 * overridden with ?api=<url>.  All other query parameters carry the
 * analysis state (map, selection, theta, chain), so links replay exactly.
 */

import { ApiClient } from "./api.js";
import { fromQuery, toQuery, AppState } from "./state.js";
import {
  renderActivityPanel,
  renderChainPanel,
  renderConsistencyDetail,
  renderHeatmap,
  renderLegend,
  renderMapGrid,
} from "./render.js";
import { h, mount, replaceChildren, withHandlers, VNode } from "./vdom.js";
import type { ChainPayload, MapDetail, PropagationPayload } from "./types.js";

const params = new URLSearchParams(location.search);
const api = new ApiClient(params.get("api") ?? "http://127.0.0.1:8742/api/v1");

const state: AppState = fromQuery(location.search);
let details: Record<string, MapDetail> = {};
let lastResult: PropagationPayload | null = null;
let lastChain: ChainPayload | null = null;

function syncUrl(): void {
  const query = toQuery(state);
  const apiParam = params.get("api");
  const suffix = apiParam
    ? query
      ? `${query}&api=${encodeURIComponent(apiParam)}`
      : `api=${encodeURIComponent(apiParam)}`
    : query;
  history.replaceState(null, "", suffix ? `?${suffix}` : location.pathname);
}

function el(id: string): Element {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing container #${id}`);
  return found;
}

function showError(message: string): void {
  replaceChildren(el("errors"), h("p", { class: "error" }, message));
}

function clearError(): void {
  el("errors").replaceChildren();
}

function toggleNode(node: number): void {
  const nodes = new Set(state.selection?.nodes ?? []);
  if (nodes.has(node)) nodes.delete(node);
  else nodes.add(node);
  state.selection = nodes.size ? { nodes: [...nodes].sort((x, y) => x - y) } : null;
  syncUrl();
  drawGrid();
}

function drawGrid(): void {
  if (!state.map || !details[state.map]) return;
  const detail = details[state.map];
  const overlay =
    lastResult && lastResult.target_map === state.map ? lastResult : undefined;
  const grid = renderMapGrid(detail, {
    overlay,
    selected: state.selection?.nodes ?? [],
  });
  const interactive: VNode = {
    ...grid,
    children: grid.children.map((cell) => {
      if (typeof cell === "string") return cell;
      const node = parseInt(cell.attrs["data-node"], 10);
      return withHandlers(cell, { click: () => toggleNode(node) });
    }),
  };
  replaceChildren(el("grid"), interactive);
  replaceChildren(el("legend"), renderLegend(detail));
}

function drawTabs(): void {
  const tabs = Object.keys(details).map((id) =>
    withHandlers(
      h(
        "button",
        { class: id === state.map ? "tab active" : "tab", "data-map": id },
        id,
      ),
      {
        click: () => {
          state.map = id;
          syncUrl();
          drawTabs();
          drawGrid();
        },
      },
    ),
  );
  replaceChildren(el("tabs"), h("nav", { class: "tab-rail" }, ...tabs));
}

function drawResult(): void {
  const container = el("payload");
  container.replaceChildren();
  if (lastChain) {
    mount(renderChainPanel(lastChain), container);
  } else if (lastResult) {
    mount(renderActivityPanel(lastResult), container);
  }
}

async function propagateSelection(): Promise<void> {
  if (!state.map || !state.target || !state.selection) {
    showError("select a source map, nodes, and a target map first");
    return;
  }
  clearError();
  try {
    lastResult = await api.propagate({
      source_map: state.map,
      target_map: state.target,
      nodes: state.selection.nodes,
      area: state.selection.area,
      theta: state.theta,
    });
    lastChain = null;
    state.chain = [
      {
        source_map: state.map,
        target_map: state.target,
        nodes: state.selection.nodes,
        area: state.selection.area,
      },
    ];
    if (!lastResult.has_carriers) {
      showError("no carriers reached the target; nothing to display");
    } else if (!lastResult.focus.length) {
      showError("empty focus at this threshold; try lowering θ");
    }
    syncUrl();
    state.map = lastResult.target_map;
    drawTabs();
    drawGrid();
    drawResult();
  } catch (error) {
    showError(`propagation failed: ${(error as Error).message}`);
  }
}

async function chainFromFocus(): Promise<void> {
  if (!lastResult || !lastResult.focus.length) {
    showError("no focus to continue from; run a propagation first");
    return;
  }
  const backTo = lastResult.source_map ?? state.target;
  if (!backTo) return;
  clearError();
  const steps = [...state.chain, {
    source_map: lastResult.target_map,
    target_map: backTo,
  }];
  try {
    lastChain = await api.chain({ steps, theta: state.theta });
    state.chain = steps;
    lastResult = lastChain.steps[lastChain.steps.length - 1];
    state.map = lastResult.target_map;
    syncUrl();
    drawTabs();
    drawGrid();
    drawResult();
  } catch (error) {
    showError(`chain failed: ${(error as Error).message}`);
  }
}

function drawControls(): void {
  const targets = Object.keys(details).map((id) =>
    h("option", state.target === id ? { value: id, selected: "" } : { value: id }, id),
  );
  const select = withHandlers(
    h("select", { id: "target-select" }, ...targets),
    {
      change: (event) => {
        state.target = (event.target as HTMLSelectElement).value;
        syncUrl();
      },
    },
  );
  const slider = withHandlers(
    h("input", {
      type: "range", min: "0.01", max: "1", step: "0.01",
      value: String(state.theta), id: "theta-slider",
    }),
    {
      input: (event) => {
        state.theta = parseFloat((event.target as HTMLInputElement).value);
        const label = document.getElementById("theta-value");
        if (label) label.textContent = String(state.theta);
        syncUrl();
      },
    },
  );
  const propagateBtn = withHandlers(
    h("button", { class: "primary" }, "propagate"),
    { click: () => void propagateSelection() },
  );
  const chainBtn = withHandlers(
    h("button", {}, "use focus as next source"),
    { click: () => void chainFromFocus() },
  );
  replaceChildren(
    el("controls"),
    h("div", { class: "controls" },
      h("label", {}, "target map ", select),
      h("label", {}, "θ ",
        h("span", { id: "theta-value" }, String(state.theta)), slider),
      propagateBtn,
      chainBtn,
    ),
  );
}

async function drawHeatmap(): Promise<void> {
  const matrix = await api.consistency();
  const table = renderHeatmap(matrix);
  const interactive: VNode = {
    ...table,
    children: table.children.map((section) => {
      if (typeof section === "string" || section.tag !== "tbody") return section;
      return {
        ...section,
        children: section.children.map((row) => {
          if (typeof row === "string") return row;
          return {
            ...row,
            children: row.children.map((cell) => {
              if (typeof cell === "string" || cell.tag !== "td") return cell;
              return withHandlers(cell, {
                click: () => {
                  void api
                    .consistencyDetail(
                      cell.attrs["data-source"],
                      cell.attrs["data-target"],
                    )
                    .then((detail) => {
                      replaceChildren(el("detail"), renderConsistencyDetail(detail));
                    });
                },
              });
            }),
          };
        }),
      };
    }),
  };
  replaceChildren(el("heatmap"), interactive);
}

async function boot(): Promise<void> {
  try {
    const summaries = await api.maps();
    const loaded = await Promise.all(summaries.map((m) => api.mapDetail(m.id)));
    details = Object.fromEntries(loaded.map((d) => [d.id, d]));
    if (!state.map || !details[state.map]) state.map = summaries[0]?.id ?? null;
    if (!state.target || !details[state.target]) {
      state.target = summaries.find((m) => m.id !== state.map)?.id ?? null;
    }
    drawTabs();
    drawGrid();
    drawControls();
    await drawHeatmap();
    if (state.chain.length) {
      lastChain = await api.chain({ steps: state.chain, theta: state.theta });
      lastResult = lastChain.steps[lastChain.steps.length - 1];
      state.map = lastResult.target_map;
      drawTabs();
      drawGrid();
      drawResult();
    }
  } catch (error) {
    showError(
      `service unreachable at ${api.base}: ${(error as Error).message}`,
    );
  }
}

void boot();
