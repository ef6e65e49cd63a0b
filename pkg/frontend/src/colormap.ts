/** Viridis-like perceptual colormap with linear interpolation between
 * sampled control points. */

const STOPS: [number, number, number][] = [
  [68, 1, 84],
  [71, 44, 122],
  [59, 81, 139],
  [44, 113, 142],
  [33, 144, 141],
  [39, 173, 129],
  [92, 200, 99],
  [170, 220, 50],
  [253, 231, 37],
];

/** Map t in [0, 1] to an RGB triple. Values outside the range are clamped. */
export function viridis(t: number): [number, number, number] {
  const clamped = Math.min(1, Math.max(0, t));
  const position = clamped * (STOPS.length - 1);
  const lower = Math.floor(position);
  const upper = Math.min(lower + 1, STOPS.length - 1);
  const frac = position - lower;
  return [0, 1, 2].map((i) =>
    Math.round(STOPS[lower][i] + frac * (STOPS[upper][i] - STOPS[lower][i])),
  ) as [number, number, number];
}
