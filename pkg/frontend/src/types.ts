/**
 * Shapes of the six bundle documents produced by the telemetry exporter.
 * The dashboard consumes these verbatim; nothing here is re-derived
 * client-side (in particular, node coordinates come straight from
 * `layout.json`).
 */

export interface BundleMeta {
  format_version: number;
  system: string;
  categories: string[];
  windows: WindowSpec[];
  delta_t: number;
  total_timesteps: number;
  config: Record<string, unknown>;
  files: Record<string, string>;
}

export interface WindowSpec {
  name: string;
  t_start: number;
  t_end: number;
}

export interface LayoutNode {
  id: string;
  x: number;
  y: number;
}

export interface BundleLayout {
  system: string;
  spec_string: string;
  grid: { width: number; height: number };
  nodes: LayoutNode[];
  alignments: Record<string, number>;
  tiers: Record<string, { lo: number; hi: number }>;
}

/** One node's score within one window/category: z, class label, raw value. */
export interface CellScore {
  z: number;
  class: string;
  value: number;
}

export interface ZScoreWindow extends WindowSpec {
  /** category name -> node id -> score */
  categories: Record<string, Record<string, CellScore>>;
}

export interface BundleZScores {
  windows: ZScoreWindow[];
}

export interface SpectrumPoint {
  frequency_hz: number;
  power: number;
  growth: number;
  level: number;
  node_path: string;
  mode_index: number;
}

export interface BundleSpectrum {
  points: SpectrumPoint[];
}

export interface BundleAnnotations {
  hardware_errors: string[];
  jobs: Record<string, string[]>;
}

/** Per-node, per-category time series; `raw` is optional in the bundle. */
export interface NodeSeries {
  raw?: number[];
  recon: number[];
}

export interface BundleSeries {
  delta_t: number;
  nodes: Record<string, Record<string, NodeSeries>>;
}

/** Everything the dashboard renders, loaded as one unit. */
export interface UiBundle {
  meta: BundleMeta;
  layout: BundleLayout;
  zscores: BundleZScores;
  spectrum: BundleSpectrum;
  annotations: BundleAnnotations;
  series: BundleSeries;
}

/** All interaction state; rendering is a pure function of (bundle, view). */
export interface ViewState {
  /** Currently selected category; always one of meta.categories. */
  category: string;
  /** Index into meta.windows / zscores.windows. */
  windowIndex: number;
  /** Node id under the cursor, or null. */
  hovered: string | null;
  /** Node ids with an open time-series panel, in opening order. */
  opened: string[];
  /** Color scale clamp: |z| beyond this renders at the scale end. */
  zMax: number;
}
