/**
 * Pure view builders.
 *
 * All numbers shown come from service payloads: each numeric cell carries
 * the verbatim payload value in `data-value` (snapshot-tested), and its
 * visible text is only a fixed-width rendering of that same value.  Focus
 * highlighting follows the payload's `focus` list; nothing is recomputed
 * client-side.
 */

import { activityAlpha, areaColor } from "./colors.js";
import { h, VNode } from "./vdom.js";
import type {
  AreaPayload,
  ChainPayload,
  ConsistencyDetailPayload,
  ConsistencyPayload,
  MapDetail,
  PropagationPayload,
} from "./types.js";

export interface GridOptions {
  /** Propagation overlay shown on this map, if any. */
  overlay?: PropagationPayload;
  /** Node indices drawn as selected. */
  selected?: number[];
}

function areaOf(detail: MapDetail): Map<number, AreaPayload> {
  const byNode = new Map<number, AreaPayload>();
  for (const area of detail.areas) {
    for (const node of area.nodes) byNode.set(node, area);
  }
  return byNode;
}

/** One map as a CSS grid of cells, colored by information area. */
export function renderMapGrid(detail: MapDetail, options: GridOptions = {}): VNode {
  const byNode = areaOf(detail);
  const overlayByNode = new Map<number, { activity: number; posterior: number }>();
  const focus = new Set(options.overlay?.focus ?? []);
  for (const entry of options.overlay?.activity ?? []) {
    overlayByNode.set(entry.node, entry);
  }
  const selected = new Set(options.selected ?? []);

  const cells: VNode[] = [];
  for (const node of detail.nodes) {
    const area = byNode.get(node.index);
    const overlay = overlayByNode.get(node.index);
    const classes = ["cell"];
    if (node.member_count === 0) classes.push("empty");
    if (area) classes.push("zoned");
    if (overlay) classes.push("active");
    if (focus.has(node.index)) classes.push("focus");
    if (selected.has(node.index)) classes.push("selected");

    const attrs: Record<string, string> = {
      class: classes.join(" "),
      "data-node": String(node.index),
      "data-coords": `${node.a},${node.b}`,
      title: node.label
        ? `${node.label} (${node.member_count} items)`
        : "empty node",
    };
    if (area) {
      attrs["data-area"] = String(area.area_id);
      attrs.style = `background-color: ${areaColor(area.area_id)}`;
    }
    const children: (VNode | string)[] = [
      h("span", { class: "cell-label" }, node.label ?? ""),
      h("span", { class: "cell-count" }, String(node.member_count)),
    ];
    if (overlay) {
      attrs["data-activity"] = String(overlay.activity);
      children.push(
        h(
          "span",
          {
            class: "cell-activity",
            "data-value": String(overlay.activity),
            style: `opacity: ${activityAlpha(overlay.activity)}`,
          },
          overlay.activity.toFixed(3),
        ),
        h(
          "span",
          { class: "cell-posterior", "data-value": String(overlay.posterior) },
          overlay.posterior.toFixed(3),
        ),
      );
    }
    cells.push(h("div", attrs, ...children));
  }
  return h(
    "div",
    {
      class: "map-grid",
      "data-map": detail.id,
      style: `grid-template-columns: repeat(${detail.width}, 1fr)`,
    },
    ...cells,
  );
}

/** Legend: one swatch per information area. */
export function renderLegend(detail: MapDetail): VNode {
  return h(
    "ul",
    { class: "legend" },
    ...detail.areas.map((area) =>
      h(
        "li",
        { class: "legend-entry", "data-area": String(area.area_id) },
        h("span", {
          class: "swatch",
          style: `background-color: ${areaColor(area.area_id)}`,
        }),
        `${area.label} (${area.member_items.length} items)`,
      ),
    ),
  );
}

/** Propagation side panel: carriers, focus, per-node values, verbatim total. */
export function renderActivityPanel(payload: PropagationPayload): VNode {
  if (!payload.has_carriers) {
    return h(
      "div",
      { class: "activity-panel" },
      h("p", { class: "notice" },
        "no carriers reached the target map; select another source"),
    );
  }
  const rows = payload.activity.map((entry) =>
    h(
      "tr",
      { "data-node": String(entry.node) },
      h("td", {}, `(${entry.a},${entry.b})`),
      h("td", { class: "activity", "data-value": String(entry.activity) },
        entry.activity.toFixed(3)),
      h("td", { class: "posterior", "data-value": String(entry.posterior) },
        entry.posterior.toFixed(3)),
    ),
  );
  return h(
    "div",
    { class: "activity-panel" },
    h("p", {},
      `activity on ${payload.target_map} from ` +
        `${payload.source_map ?? "?"} nodes [${payload.source_nodes.join(", ")}]`),
    h(
      "table",
      { class: "activity-table" },
      h("thead", {}, h("tr", {},
        h("th", {}, "node"), h("th", {}, "activity"), h("th", {}, "posterior"))),
      h("tbody", {}, ...rows),
    ),
    h(
      "p",
      { class: "activity-total" },
      "total: ",
      h("span", { "data-value": String(payload.activity_total) },
        String(payload.activity_total)),
    ),
    h("p", { class: "focus-line" },
      `focus (activity ≥ ${payload.theta}): [${payload.focus.join(", ")}]`),
  );
}

/** Asymmetric heatmap; rows are sources, columns targets. */
export function renderHeatmap(matrix: ConsistencyPayload): VNode {
  const header = h(
    "tr",
    {},
    h("th", {}, "source \\ target"),
    ...matrix.viewpoints.map((vp) => h("th", {}, vp)),
  );
  const rows = matrix.values.map((row, i) =>
    h(
      "tr",
      {},
      h("th", {}, matrix.viewpoints[i]),
      ...row.map((value, j) => {
        const classes = ["heat-cell"];
        if (i === j) classes.push("diagonal");
        return h(
          "td",
          {
            class: classes.join(" "),
            "data-source": matrix.viewpoints[i],
            "data-target": matrix.viewpoints[j],
            "data-value": String(value),
            style: `background-color: rgba(208, 80, 44, ${activityAlpha(value)})`,
          },
          value.toFixed(2),
        );
      }),
    ),
  );
  return h("table", { class: "heatmap" }, h("thead", {}, header), h("tbody", {}, ...rows));
}

/** Per-source-node dispersion detail behind a heatmap cell. */
export function renderConsistencyDetail(detail: ConsistencyDetailPayload): VNode {
  const rows = Object.entries(detail.per_source).map(([node, info]) =>
    h(
      "tr",
      { "data-node": node },
      h("td", {}, node),
      h("td", {}, info.targets.map(([a, b]) => `(${a},${b})`).join(" ")),
      h("td", { class: "dispersion", "data-value": String(info.dispersion) },
        info.dispersion.toFixed(3)),
      h("td", { class: "term", "data-value": String(info.term) },
        info.term.toFixed(3)),
    ),
  );
  return h(
    "div",
    { class: "consistency-detail" },
    h("p", {},
      `${detail.source} → ${detail.target}: `,
      h("span", { class: "pc-value", "data-value": String(detail.value) },
        String(detail.value))),
    h(
      "table",
      {},
      h("thead", {}, h("tr", {},
        h("th", {}, "source node"), h("th", {}, "targets"),
        h("th", {}, "dispersion"), h("th", {}, "term"))),
      h("tbody", {}, ...rows),
    ),
    detail.excluded_sources.length
      ? h("p", { class: "excluded" },
          `excluded sources (no carriers): [${detail.excluded_sources.join(", ")}]`)
      : null,
  );
}

/** Chain history: one activity panel per executed step. */
export function renderChainPanel(chain: ChainPayload): VNode {
  return h(
    "div",
    { class: "chain-panel" },
    ...chain.steps.map((step, i) =>
      h(
        "section",
        { class: "chain-step", "data-step": String(i + 1) },
        h("h3", {}, `step ${i + 1}: ${step.source_map} → ${step.target_map}`),
        renderActivityPanel(step),
      ),
    ),
  );
}
