/**
 * The rack grid: one cell per layout node, positioned purely from the
 * bundle's (x, y) coordinates on a CSS grid sized from layout.grid. Cells
 * are created once per bundle; category/window switches only restyle the
 * existing elements (recolor), never rebuild them.
 */

import type { BundleAnnotations, BundleLayout, CellScore, ViewState } from "./types.js";
import { NO_DATA_COLOR, zColor } from "./turbo.js";

export interface RackGrid {
  element: HTMLElement;
  /** node id -> its cell element */
  cells: Map<string, HTMLElement>;
}

export function buildGrid(doc: Document, layout: BundleLayout): RackGrid {
  const element = doc.createElement("div");
  element.className = "rack-grid";
  element.style.display = "grid";
  element.style.gridTemplateColumns = `repeat(${layout.grid.width}, var(--cell, 14px))`;
  element.style.gridTemplateRows = `repeat(${layout.grid.height}, var(--cell, 14px))`;

  const cells = new Map<string, HTMLElement>();
  for (const node of layout.nodes) {
    const cell = doc.createElement("div");
    cell.className = "cell";
    cell.dataset.id = node.id;
    cell.dataset.x = String(node.x);
    cell.dataset.y = String(node.y);
    // CSS grid lines are 1-based; bundle coordinates are 0-based.
    cell.style.gridColumnStart = String(node.x + 1);
    cell.style.gridRowStart = String(node.y + 1);
    element.appendChild(cell);
    cells.set(node.id, cell);
  }
  return { element, cells };
}

/**
 * Restyle every cell for the given score map. Nodes without a score get the
 * neutral no-data fill. Only styles and data attributes change — the cell
 * elements and their grid positions are untouched.
 */
export function recolor(
  grid: RackGrid,
  scores: Record<string, CellScore>,
  view: ViewState,
): void {
  for (const [id, cell] of grid.cells) {
    const score = scores[id];
    if (score === undefined) {
      cell.style.backgroundColor = NO_DATA_COLOR;
      delete cell.dataset.z;
      delete cell.dataset.cls;
    } else {
      cell.style.backgroundColor = zColor(score.z, view.zMax);
      cell.dataset.z = String(score.z);
      cell.dataset.cls = score.class;
    }
  }
}

/**
 * Outline annotations: dark outlines mark hardware errors, red outlines mark
 * job-allocated nodes. A node can carry both; the hardware outline wins
 * visually (it is applied last in CSS) but both classes stay queryable.
 * Annotation ids are validated against the layout at export time, so every
 * id listed here has a cell.
 */
export function applyOutlines(
  grid: RackGrid,
  annotations: BundleAnnotations,
): void {
  for (const cell of grid.cells.values()) {
    cell.classList.remove("hw-error", "job");
    delete cell.dataset.job;
  }
  for (const [job, ids] of Object.entries(annotations.jobs)) {
    for (const id of ids) {
      const cell = grid.cells.get(id);
      if (cell) {
        cell.classList.add("job");
        cell.dataset.job = job;
      }
    }
  }
  for (const id of annotations.hardware_errors) {
    grid.cells.get(id)?.classList.add("hw-error");
  }
}
