/**
 * Dashboard assembly: fetch the six bundle documents, build the controls,
 * legend, rack grid, and panel area, and route DOM events through the
 * ViewState transitions. The DOM is patched minimally — switching category
 * or window restyles the existing cells, it never rebuilds the grid.
 */

import type { UiBundle, ViewState } from "./types.js";
import {
  createViewState,
  currentScores,
  selectCategory,
  selectWindow,
  setHovered,
  toggleOpened,
} from "./state.js";
import { applyOutlines, buildGrid, recolor, type RackGrid } from "./grid.js";
import { buildLegend } from "./legend.js";
import { buildPanel } from "./panel.js";
import { buildTooltip, hideTooltip, showTooltip } from "./tooltip.js";

const BUNDLE_DOCS = [
  "meta",
  "layout",
  "zscores",
  "spectrum",
  "annotations",
  "series",
] as const;

type Fetcher = (url: string) => Promise<Response>;

/** Fetch all six documents from `<base>/<name>` and assemble the bundle. */
export async function loadBundle(
  base: string,
  fetcher: Fetcher = (url) => fetch(url),
): Promise<UiBundle> {
  const docs = await Promise.all(
    BUNDLE_DOCS.map(async (name) => {
      const url = `${base}/${name}`;
      const res = await fetcher(url);
      if (!res.ok) {
        throw new Error(`bundle fetch failed: ${url} (HTTP ${res.status})`);
      }
      return res.json();
    }),
  );
  const bundle = {
    meta: docs[0],
    layout: docs[1],
    zscores: docs[2],
    spectrum: docs[3],
    annotations: docs[4],
    series: docs[5],
  } as UiBundle;
  if (bundle.zscores.windows.length !== bundle.meta.windows.length) {
    throw new Error("bundle documents disagree on the analysis windows");
  }
  return bundle;
}

export interface App {
  root: HTMLElement;
  bundle: UiBundle;
  readonly state: ViewState;
  grid: RackGrid;
  categorySelect: HTMLSelectElement;
  windowSelect: HTMLSelectElement;
  legend: HTMLElement;
  panelsHost: HTMLElement;
  tooltip: HTMLElement;
  setCategory(name: string): void;
  setWindow(index: number): void;
  hover(id: string | null, x?: number, y?: number): void;
  toggleNode(id: string): void;
}

export function createApp(
  root: HTMLElement,
  bundle: UiBundle,
  options: { zMax?: number } = {},
): App {
  const doc = root.ownerDocument;
  let state = createViewState(bundle, options);

  const header = doc.createElement("header");
  header.className = "app-header";
  const title = doc.createElement("h1");
  title.textContent = bundle.meta.system;
  header.appendChild(title);

  const categorySelect = doc.createElement("select");
  categorySelect.className = "category-select";
  for (const cat of bundle.meta.categories) {
    const option = doc.createElement("option");
    option.value = cat;
    option.textContent = cat;
    categorySelect.appendChild(option);
  }

  const windowSelect = doc.createElement("select");
  windowSelect.className = "window-select";
  bundle.meta.windows.forEach((win, i) => {
    const option = doc.createElement("option");
    option.value = String(i);
    option.textContent = `${win.name} [${win.t_start}, ${win.t_end})`;
    windowSelect.appendChild(option);
  });

  header.appendChild(categorySelect);
  header.appendChild(windowSelect);

  const legend = buildLegend(doc, state.zMax);
  const grid = buildGrid(doc, bundle.layout);
  const panelsHost = doc.createElement("div");
  panelsHost.className = "panels";
  const tooltip = buildTooltip(doc);

  root.appendChild(header);
  root.appendChild(legend);
  root.appendChild(grid.element);
  root.appendChild(panelsHost);
  root.appendChild(tooltip);

  // A category can be absent from individual windows (no scored sensors
  // there); its option is disabled while such a window is selected.
  function refreshCategoryAvailability(): void {
    const available = bundle.zscores.windows[state.windowIndex].categories;
    for (const option of Array.from(categorySelect.options)) {
      option.disabled = !(option.value in available);
    }
  }

  function repaint(): void {
    recolor(grid, currentScores(bundle, state), state);
  }

  function renderPanels(): void {
    panelsHost.replaceChildren(
      ...state.opened.map((id) => buildPanel(doc, bundle, id, state)),
    );
  }

  const app: App = {
    root,
    bundle,
    get state() {
      return state;
    },
    grid,
    categorySelect,
    windowSelect,
    legend,
    panelsHost,
    tooltip,
    setCategory(name: string): void {
      state = selectCategory(state, bundle, name);
      categorySelect.value = name;
      repaint();
      renderPanels();
    },
    setWindow(index: number): void {
      state = selectWindow(state, bundle, index);
      windowSelect.value = String(index);
      refreshCategoryAvailability();
      repaint();
    },
    hover(id: string | null, x = 0, y = 0): void {
      state = setHovered(state, bundle, id);
      if (id === null) {
        hideTooltip(tooltip);
      } else {
        showTooltip(tooltip, id, currentScores(bundle, state)[id], x, y);
      }
    },
    toggleNode(id: string): void {
      state = toggleOpened(state, bundle, id);
      renderPanels();
    },
  };

  categorySelect.addEventListener("change", () => {
    app.setCategory(categorySelect.value);
  });
  windowSelect.addEventListener("change", () => {
    app.setWindow(Number(windowSelect.value));
  });

  grid.element.addEventListener("mouseover", (event: Event) => {
    const cell = (event.target as Element).closest?.(".cell") as HTMLElement | null;
    if (cell?.dataset.id) {
      const e = event as MouseEvent;
      app.hover(cell.dataset.id, e.clientX, e.clientY);
    }
  });
  grid.element.addEventListener("mouseout", (event: Event) => {
    const cell = (event.target as Element).closest?.(".cell");
    if (cell) app.hover(null);
  });
  grid.element.addEventListener("click", (event: Event) => {
    const cell = (event.target as Element).closest?.(".cell") as HTMLElement | null;
    if (cell?.dataset.id) app.toggleNode(cell.dataset.id);
  });
  panelsHost.addEventListener("click", (event: Event) => {
    const button = (event.target as Element).closest?.(".panel-close");
    if (!button) return;
    const panel = button.closest(".panel") as HTMLElement | null;
    if (panel?.dataset.node) app.toggleNode(panel.dataset.node);
  });

  refreshCategoryAvailability();
  applyOutlines(grid, bundle.annotations);
  repaint();
  return app;
}

/** Browser entry point: mount into #app when the page provides one. */
export function boot(mount: HTMLElement): void {
  const params = new URLSearchParams(mount.ownerDocument.defaultView?.location.search ?? "");
  const base = params.get("bundle") ?? "bundle";
  mount.textContent = "loading bundle…";
  loadBundle(base)
    .then((bundle) => {
      mount.replaceChildren();
      createApp(mount, bundle);
    })
    .catch((err: unknown) => {
      mount.textContent = `failed to load the bundle: ${String(err)}`;
      mount.className = "load-error";
    });
}

if (typeof document !== "undefined") {
  const mount = document.getElementById("app");
  if (mount) boot(mount);
}
