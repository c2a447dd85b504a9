import { describe, expect, it } from "vitest";
import {
  buildPanel,
  PLOT_WIDTH,
  pointsFor,
  sharedExtent,
} from "../src/panel.js";
import { createViewState, selectCategory } from "../src/state.js";
import { readFixture } from "./helpers.js";

const bundle = readFixture("flip48");
const nodeId = bundle.layout.nodes[0].id;
const view = createViewState(bundle);

describe("pointsFor", () => {
  it("is deterministic and two-decimal", () => {
    const points = pointsFor([0, 1, 2], 0, 2);
    expect(points).toBe(pointsFor([0, 1, 2], 0, 2));
    expect(points.split(" ")).toHaveLength(3);
    for (const pair of points.split(" ")) {
      expect(pair).toMatch(/^\d+(\.\d{1,2})?,\d+(\.\d{1,2})?$/);
    }
  });

  it("maps the extremes to the box edges", () => {
    const [first, , last] = pointsFor([0, 1, 2], 0, 2).split(" ");
    const firstY = Number(first.split(",")[1]);
    const lastY = Number(last.split(",")[1]);
    expect(firstY).toBeGreaterThan(lastY); // larger value sits higher (smaller y)
  });

  it("survives a flat series without dividing by zero", () => {
    const points = pointsFor([5, 5, 5], 5, 5);
    expect(points).not.toContain("NaN");
  });
});

describe("buildPanel", () => {
  it("draws raw and reconstruction traces from the bundle series", () => {
    const panel = buildPanel(document, bundle, nodeId, view);
    const series = bundle.series.nodes[nodeId][view.category];
    const [lo, hi] = sharedExtent(series);
    const raw = panel.querySelector('polyline[data-kind="raw"]')!;
    const recon = panel.querySelector('polyline[data-kind="recon"]')!;
    expect(raw.getAttribute("points")).toBe(pointsFor(series.raw!, lo, hi));
    expect(recon.getAttribute("points")).toBe(pointsFor(series.recon, lo, hi));
  });

  it("titles the panel with the node id and category", () => {
    const panel = buildPanel(document, bundle, nodeId, view);
    expect(panel.querySelector(".panel-title")!.textContent).toContain(nodeId);
    expect(panel.querySelector(".panel-title")!.textContent).toContain(view.category);
    expect(panel.dataset.node).toBe(nodeId);
  });

  it("switches series with the selected category", () => {
    const powerView = selectCategory(view, bundle, "power");
    const panel = buildPanel(document, bundle, nodeId, powerView);
    const series = bundle.series.nodes[nodeId]["power"];
    const [lo, hi] = sharedExtent(series);
    const recon = panel.querySelector('polyline[data-kind="recon"]')!;
    expect(recon.getAttribute("points")).toBe(pointsFor(series.recon, lo, hi));
  });

  it("shows an empty state when the bundle has no series for the node", () => {
    const doctored = structuredClone(bundle);
    delete doctored.series.nodes[nodeId];
    const panel = buildPanel(document, doctored, nodeId, view);
    expect(panel.querySelector("svg")).toBeNull();
    expect(panel.querySelector(".panel-empty")!.textContent).toMatch(/no time series/);
  });

  it("reads off values under the cursor and clears on leave", () => {
    const panel = buildPanel(document, bundle, nodeId, view);
    document.body.appendChild(panel);
    const svg = panel.querySelector("svg")!;
    const readout = panel.querySelector(".panel-readout")!;
    const series = bundle.series.nodes[nodeId][view.category];
    const last = series.recon.length - 1;

    svg.dispatchEvent(new MouseEvent("mousemove", { clientX: PLOT_WIDTH }));
    expect(readout.textContent).toContain(`recon ${series.recon[last].toFixed(4)}`);
    expect(readout.textContent).toContain(`raw ${series.raw![last].toFixed(4)}`);

    svg.dispatchEvent(new MouseEvent("mousemove", { clientX: 0 }));
    expect(readout.textContent).toContain(`recon ${series.recon[0].toFixed(4)}`);

    svg.dispatchEvent(new MouseEvent("mouseleave"));
    expect(readout.textContent?.trim()).toBe("");
    panel.remove();
  });

  it("omits the raw trace when the bundle has none", () => {
    const big = readFixture("machine1408");
    const id = big.layout.nodes[0].id;
    const panel = buildPanel(document, big, id, createViewState(big));
    expect(panel.querySelector('polyline[data-kind="raw"]')).toBeNull();
    expect(panel.querySelector('polyline[data-kind="recon"]')).not.toBeNull();
  });
});
