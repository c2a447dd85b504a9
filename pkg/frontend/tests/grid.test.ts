import { describe, expect, it } from "vitest";
import { applyOutlines, buildGrid, recolor } from "../src/grid.js";
import { createViewState, currentScores, selectCategory } from "../src/state.js";
import { NO_DATA_COLOR } from "../src/turbo.js";
import { readFixture, rgbChannels } from "./helpers.js";

const bundle = readFixture("flip48");

function freshGrid() {
  return buildGrid(document, bundle.layout);
}

describe("buildGrid", () => {
  it("creates one cell per layout node", () => {
    const grid = freshGrid();
    expect(grid.cells.size).toBe(bundle.layout.nodes.length);
    expect(grid.element.querySelectorAll(".cell").length).toBe(bundle.layout.nodes.length);
  });

  it("places every cell at its bundle coordinate, with no overlaps", () => {
    const grid = freshGrid();
    const seen = new Set<string>();
    for (const node of bundle.layout.nodes) {
      const cell = grid.cells.get(node.id)!;
      expect(cell.dataset.x).toBe(String(node.x));
      expect(cell.dataset.y).toBe(String(node.y));
      const key = `${cell.dataset.x},${cell.dataset.y}`;
      expect(seen.has(key)).toBe(false);
      seen.add(key);
    }
  });

  it("sizes the CSS grid from the bundle's grid dimensions", () => {
    const grid = freshGrid();
    expect(grid.element.style.gridTemplateColumns).toContain(
      String(bundle.layout.grid.width),
    );
    expect(grid.element.style.gridTemplateRows).toContain(
      String(bundle.layout.grid.height),
    );
  });
});

describe("recolor", () => {
  it("fills every scored cell and tags its class", () => {
    const grid = freshGrid();
    const view = createViewState(bundle);
    recolor(grid, currentScores(bundle, view), view);
    for (const cell of grid.cells.values()) {
      expect(cell.style.backgroundColor).toMatch(/^rgb\(/);
      expect(cell.dataset.cls).toBeTruthy();
    }
  });

  it("paints nodes missing from the score map as no-data", () => {
    const grid = freshGrid();
    const view = createViewState(bundle);
    const scores = { ...currentScores(bundle, view) };
    const dropped = bundle.layout.nodes[3].id;
    delete scores[dropped];
    recolor(grid, scores, view);
    const cell = grid.cells.get(dropped)!;
    expect(rgbChannels(cell.style.backgroundColor)).toEqual(
      rgbChannels(NO_DATA_COLOR),
    );
    expect(cell.dataset.cls).toBeUndefined();
  });

  it("restyles in place without touching the elements", () => {
    const grid = freshGrid();
    const view = createViewState(bundle);
    recolor(grid, currentScores(bundle, view), view);
    const before = new Map(
      [...grid.cells].map(([id, cell]) => [id, cell] as const),
    );
    const altered = { ...view, windowIndex: 1 };
    recolor(grid, currentScores(bundle, altered), altered);
    for (const [id, cell] of grid.cells) {
      expect(cell).toBe(before.get(id));
    }
  });

  it("uses blue hues below baseline and red above", () => {
    // The temperature category is the one with scores past both boundaries.
    const view = selectCategory(createViewState(bundle), bundle, "temperature");
    const grid = freshGrid();
    recolor(grid, currentScores(bundle, view), view);
    const scores = currentScores(bundle, view);
    const hot = Object.keys(scores).find((id) => scores[id].z > 2)!;
    const cold = Object.keys(scores).find((id) => scores[id].z < -1.5)!;
    const [rh, , bh] = rgbChannels(grid.cells.get(hot)!.style.backgroundColor);
    const [rc, , bc] = rgbChannels(grid.cells.get(cold)!.style.backgroundColor);
    expect(rh).toBeGreaterThan(bh);
    expect(bc).toBeGreaterThan(rc);
  });
});

describe("applyOutlines", () => {
  it("marks hardware errors and job allocations from the annotations", () => {
    const grid = freshGrid();
    applyOutlines(grid, bundle.annotations);
    for (const id of bundle.annotations.hardware_errors) {
      expect(grid.cells.get(id)!.classList.contains("hw-error")).toBe(true);
    }
    for (const [job, ids] of Object.entries(bundle.annotations.jobs)) {
      for (const id of ids) {
        const cell = grid.cells.get(id)!;
        expect(cell.classList.contains("job")).toBe(true);
        expect(cell.dataset.job).toBe(job);
      }
    }
  });

  it("leaves unannotated cells unmarked", () => {
    const grid = freshGrid();
    applyOutlines(grid, bundle.annotations);
    const marked = new Set([
      ...bundle.annotations.hardware_errors,
      ...Object.values(bundle.annotations.jobs).flat(),
    ]);
    let clean = 0;
    for (const [id, cell] of grid.cells) {
      if (!marked.has(id)) {
        expect(cell.classList.contains("hw-error")).toBe(false);
        expect(cell.classList.contains("job")).toBe(false);
        clean++;
      }
    }
    expect(clean).toBeGreaterThan(0);
  });

  it("clears stale marks when reapplied with fewer annotations", () => {
    const grid = freshGrid();
    applyOutlines(grid, bundle.annotations);
    applyOutlines(grid, { hardware_errors: [], jobs: {} });
    for (const cell of grid.cells.values()) {
      expect(cell.classList.contains("hw-error")).toBe(false);
      expect(cell.classList.contains("job")).toBe(false);
      expect(cell.dataset.job).toBeUndefined();
    }
  });
});
