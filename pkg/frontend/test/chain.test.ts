/**
 * Two-step chain on the coupled fixture: the backward step must highlight
 * the original source cells, exactly as the service's chain result says.
 */

import { describe, expect, it } from "vitest";

import { renderChainPanel, renderMapGrid } from "../src/render.js";
import { findAll, textOf, VNode } from "../src/vdom.js";
import type { ChainPayload, MapDetail } from "../src/types.js";
import { fixture } from "./fixtures.js";

const chain = fixture<ChainPayload>("chain.json");
const mapAlpha = fixture<MapDetail>("map_alpha.json");

function byClass(root: VNode, name: string): VNode[] {
  return findAll(root, (n) => (n.attrs.class ?? "").split(" ").includes(name));
}

describe("two-step chain", () => {
  it("fixture really is a forward step and a backward step", () => {
    expect(chain.steps.length).toBe(2);
    expect(chain.steps[0].source_map).toBe("alpha");
    expect(chain.steps[0].target_map).toBe("beta");
    expect(chain.steps[1].source_map).toBe("beta");
    expect(chain.steps[1].target_map).toBe("alpha");
  });

  it("backward overlay highlights the original source cells", () => {
    const backward = chain.steps[1];
    const grid = renderMapGrid(mapAlpha, { overlay: backward });
    const highlighted = byClass(grid, "focus").map((c) =>
      parseInt(c.attrs["data-node"], 10),
    );
    expect(highlighted.sort()).toEqual([...backward.focus].sort());
    for (const source of chain.steps[0].source_nodes) {
      expect(highlighted).toContain(source);
    }
  });

  it("chain panel shows each step's values verbatim", () => {
    const panel = renderChainPanel(chain);
    const sections = byClass(panel, "chain-step");
    expect(sections.length).toBe(2);
    chain.steps.forEach((step, i) => {
      const section = sections[i];
      expect(textOf(section)).toContain(
        `step ${i + 1}: ${step.source_map} → ${step.target_map}`,
      );
      for (const entry of step.activity) {
        const cell = findAll(section, (n) =>
          n.attrs["data-value"] === String(entry.activity));
        expect(cell.length).toBeGreaterThan(0);
      }
      const total = byClass(section, "activity-total")[0];
      expect(textOf(total)).toContain(String(step.activity_total));
    });
  });
});
