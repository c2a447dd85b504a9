// Hover tooltip: the canonical node id, plus the node's score in the
// selected window/category when it has one.

import type { CellScore } from "./types.js";

export function buildTooltip(doc: Document): HTMLElement {
  const tip = doc.createElement("div");
  tip.className = "tooltip";
  tip.style.display = "none";
  tip.style.position = "fixed";
  return tip;
}

export function showTooltip(
  tip: HTMLElement,
  id: string,
  score: CellScore | undefined,
  x: number,
  y: number,
): void {
  const name = tip.ownerDocument.createElement("div");
  name.className = "tooltip-id";
  name.textContent = id;
  tip.replaceChildren(name);
  if (score !== undefined) {
    const detail = tip.ownerDocument.createElement("div");
    detail.className = "tooltip-score";
    detail.textContent = `z = ${score.z.toFixed(2)} (${score.class}), value ${score.value.toFixed(3)}`;
    tip.appendChild(detail);
  }
  tip.style.left = `${x + 12}px`;
  tip.style.top = `${y + 12}px`;
  tip.style.display = "block";
}

export function hideTooltip(tip: HTMLElement): void {
  tip.style.display = "none";
  tip.replaceChildren();
}
