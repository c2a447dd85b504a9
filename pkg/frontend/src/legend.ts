// Color-scale legend: the Turbo gradient over [-zMax, +zMax] with tick
// marks at the class boundaries -1.5 / 1.5 / 2 (near-baseline band edges
// and the high-score cutoff).

import { CLASS_EDGES, scalePoint, turboRgb } from "./turbo.js";

const GRADIENT_STOPS = 32;

export function buildLegend(doc: Document, zMax: number): HTMLElement {
  const legend = doc.createElement("div");
  legend.className = "legend";

  const bar = doc.createElement("div");
  bar.className = "legend-bar";
  const stops: string[] = [];
  for (let i = 0; i <= GRADIENT_STOPS; i++) {
    const [r, g, b] = turboRgb(scalePoint(i / GRADIENT_STOPS));
    stops.push(`rgb(${r},${g},${b}) ${(100 * i) / GRADIENT_STOPS}%`);
  }
  bar.style.background = `linear-gradient(to right, ${stops.join(", ")})`;
  legend.appendChild(bar);

  for (const edge of CLASS_EDGES) {
    const mark = doc.createElement("div");
    mark.className = "legend-mark";
    mark.dataset.edge = String(edge);
    mark.style.left = `${(100 * (edge + zMax)) / (2 * zMax)}%`;
    const label = doc.createElement("span");
    label.textContent = String(edge);
    mark.appendChild(label);
    legend.appendChild(mark);
  }

  const lo = doc.createElement("span");
  lo.className = "legend-end";
  lo.textContent = `z ≤ −${zMax}`;
  const hi = doc.createElement("span");
  hi.className = "legend-end legend-end-hi";
  hi.textContent = `z ≥ ${zMax}`;
  legend.appendChild(lo);
  legend.appendChild(hi);
  return legend;
}
