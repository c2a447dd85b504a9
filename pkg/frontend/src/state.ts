/**
 * ViewState transitions. Every function returns a fresh state object and
 * enforces the state invariants: the selected category is always one of the
 * bundle's categories, the window index is always in range, and hovered /
 * opened ids always exist in the layout. Renderers may therefore index the
 * bundle without further checks.
 */

import type { UiBundle, ViewState } from "./types.js";
import { DEFAULT_Z_MAX } from "./turbo.js";

export function createViewState(
  bundle: UiBundle,
  options: { zMax?: number } = {},
): ViewState {
  if (bundle.meta.categories.length === 0) {
    throw new RangeError("bundle declares no categories");
  }
  if (bundle.meta.windows.length === 0) {
    throw new RangeError("bundle declares no analysis windows");
  }
  const zMax = options.zMax ?? DEFAULT_Z_MAX;
  if (!(zMax > 0)) throw new RangeError("zMax must be positive");
  return {
    category: bundle.meta.categories[0],
    windowIndex: 0,
    hovered: null,
    opened: [],
    zMax,
  };
}

export function layoutIds(bundle: UiBundle): Set<string> {
  return new Set(bundle.layout.nodes.map((n) => n.id));
}

export function selectCategory(
  state: ViewState,
  bundle: UiBundle,
  category: string,
): ViewState {
  if (!bundle.meta.categories.includes(category)) {
    throw new RangeError(`unknown category: ${category}`);
  }
  return { ...state, category };
}

export function selectWindow(
  state: ViewState,
  bundle: UiBundle,
  index: number,
): ViewState {
  if (!Number.isInteger(index) || index < 0 || index >= bundle.meta.windows.length) {
    throw new RangeError(`window index out of range: ${index}`);
  }
  return { ...state, windowIndex: index };
}

export function setHovered(
  state: ViewState,
  bundle: UiBundle,
  id: string | null,
): ViewState {
  if (id !== null && !layoutIds(bundle).has(id)) {
    throw new RangeError(`hovered id not in layout: ${id}`);
  }
  return { ...state, hovered: id };
}

/** Click semantics: a closed node opens, an open node closes. */
export function toggleOpened(
  state: ViewState,
  bundle: UiBundle,
  id: string,
): ViewState {
  if (!layoutIds(bundle).has(id)) {
    throw new RangeError(`node id not in layout: ${id}`);
  }
  const opened = state.opened.includes(id)
    ? state.opened.filter((o) => o !== id)
    : [...state.opened, id];
  return { ...state, opened };
}

/** Scores for the selected window + category; empty map when the window
 * carries no data for that category. */
export function currentScores(
  bundle: UiBundle,
  state: ViewState,
): Record<string, { z: number; class: string; value: number }> {
  const win = bundle.zscores.windows[state.windowIndex];
  return win.categories[state.category] ?? {};
}
