// Diverging node coloring on the Turbo colormap: blue hues for negative
// z-scores, green near zero, red for positive. z is clamped to ±zMax so a
// single runaway sensor cannot wash out the rest of the machine.

/** Class boundaries drawn on the legend: low < -1.5, elevated > 1.5, high > 2. */
export const CLASS_EDGES = [-1.5, 1.5, 2] as const;

/** Default clamp for the color scale. */
export const DEFAULT_Z_MAX = 4;

/** Fill used for nodes with no score in the selected window/category. */
export const NO_DATA_COLOR = "rgb(128,128,128)";

function polyChannel(t: number, c: readonly number[]): number {
  const v = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
  return Math.max(0, Math.min(255, Math.round(v)));
}

const R = [34.61, 1172.33, -10793.56, 33300.12, -38394.49, 14825.05] as const;
const G = [23.31, 557.33, 1225.33, -3574.96, 1073.77, 707.56] as const;
const B = [27.2, 3211.1, -15327.97, 27814.0, -22569.18, 6838.66] as const;

/** Polynomial fit of the Turbo colormap; t in [0, 1] (clamped). */
export function turboRgb(t: number): [number, number, number] {
  const u = Math.max(0, Math.min(1, t));
  return [polyChannel(u, R), polyChannel(u, G), polyChannel(u, B)];
}

// The polynomial's outermost few percent fade to near-black; the scale
// samples a hair inside so even fully clamped scores keep a readable hue.
// The window is symmetric, so z = 0 still lands exactly at t = 0.5.
const SCALE_LO = 0.03;
const SCALE_SPAN = 0.94;

/** Colormap position actually used for a unit-scale value. */
export function scalePoint(u: number): number {
  return SCALE_LO + Math.max(0, Math.min(1, u)) * SCALE_SPAN;
}

/** Map a z-score onto [0, 1] with z = 0 at the exact midpoint. */
export function zToUnit(z: number, zMax: number = DEFAULT_Z_MAX): number {
  if (!(zMax > 0)) throw new RangeError("zMax must be positive");
  const clamped = Math.max(-zMax, Math.min(zMax, z));
  return 0.5 + clamped / (2 * zMax);
}

/** CSS color for a z-score on the diverging scale. */
export function zColor(z: number, zMax: number = DEFAULT_Z_MAX): string {
  const [r, g, b] = turboRgb(scalePoint(zToUnit(z, zMax)));
  return `rgb(${r},${g},${b})`;
}
