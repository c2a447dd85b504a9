/**
 * Drill-down panel: the clicked node's time series for the selected
 * category, raw readings plus the model reconstruction overlay when the
 * bundle carries raw data. Both traces share one y-scale so the overlay is
 * comparable. Hovering the plot reads off the values under the cursor.
 */

import type { NodeSeries, UiBundle, ViewState } from "./types.js";

export const PLOT_WIDTH = 360;
export const PLOT_HEIGHT = 120;
const PAD = 4;
const SVG_NS = "http://www.w3.org/2000/svg";

/**
 * Deterministic polyline encoding of a series into the plot box: x spreads
 * sample indices across the width, y is scaled to [lo, hi] (value axis
 * grows upward). Coordinates are fixed to 2 decimals so the attribute
 * string is reproducible.
 */
export function pointsFor(values: number[], lo: number, hi: number): string {
  const span = hi - lo || 1;
  const step = values.length > 1 ? (PLOT_WIDTH - 2 * PAD) / (values.length - 1) : 0;
  return values
    .map((v, i) => {
      const x = PAD + i * step;
      const y = PLOT_HEIGHT - PAD - ((v - lo) / span) * (PLOT_HEIGHT - 2 * PAD);
      return `${x.toFixed(2)},${y.toFixed(2)}`;
    })
    .join(" ");
}

/** Shared extent of every trace drawn in one panel. */
export function sharedExtent(series: NodeSeries): [number, number] {
  const all = series.raw ? series.raw.concat(series.recon) : series.recon;
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of all) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

function tracePolyline(
  doc: Document,
  kind: "raw" | "recon",
  values: number[],
  lo: number,
  hi: number,
): SVGPolylineElement {
  const line = doc.createElementNS(SVG_NS, "polyline") as SVGPolylineElement;
  line.setAttribute("class", `trace trace-${kind}`);
  line.setAttribute("data-kind", kind);
  line.setAttribute("fill", "none");
  line.setAttribute("points", pointsFor(values, lo, hi));
  return line;
}

export function buildPanel(
  doc: Document,
  bundle: UiBundle,
  nodeId: string,
  view: ViewState,
): HTMLElement {
  const panel = doc.createElement("section");
  panel.className = "panel";
  panel.dataset.node = nodeId;

  const header = doc.createElement("header");
  const title = doc.createElement("span");
  title.className = "panel-title";
  title.textContent = `${nodeId} · ${view.category}`;
  const close = doc.createElement("button");
  close.className = "panel-close";
  close.type = "button";
  close.textContent = "×";
  close.setAttribute("aria-label", `close ${nodeId}`);
  header.appendChild(title);
  header.appendChild(close);
  panel.appendChild(header);

  const series = bundle.series.nodes[nodeId]?.[view.category];
  if (series === undefined) {
    const empty = doc.createElement("p");
    empty.className = "panel-empty";
    empty.textContent = "no time series in the bundle for this node and category";
    panel.appendChild(empty);
    return panel;
  }

  const [lo, hi] = sharedExtent(series);
  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "panel-plot");
  svg.setAttribute("viewBox", `0 0 ${PLOT_WIDTH} ${PLOT_HEIGHT}`);
  svg.setAttribute("width", String(PLOT_WIDTH));
  svg.setAttribute("height", String(PLOT_HEIGHT));
  if (series.raw) {
    svg.appendChild(tracePolyline(doc, "raw", series.raw, lo, hi));
  }
  svg.appendChild(tracePolyline(doc, "recon", series.recon, lo, hi));
  panel.appendChild(svg);

  const readout = doc.createElement("div");
  readout.className = "panel-readout";
  readout.textContent = " ";
  panel.appendChild(readout);

  const count = series.recon.length;
  svg.addEventListener("mousemove", (event: Event) => {
    const e = event as MouseEvent;
    const left = (svg as unknown as Element).getBoundingClientRect().left;
    const frac = (e.clientX - left - PAD) / (PLOT_WIDTH - 2 * PAD);
    const i = Math.max(0, Math.min(count - 1, Math.round(frac * (count - 1))));
    const t = (bundle.series.delta_t * i).toFixed(3);
    const parts = [`t = ${t}`];
    if (series.raw) parts.push(`raw ${series.raw[i].toFixed(4)}`);
    parts.push(`recon ${series.recon[i].toFixed(4)}`);
    readout.textContent = parts.join("  ·  ");
  });
  svg.addEventListener("mouseleave", () => {
    readout.textContent = " ";
  });

  return panel;
}
