/** Density heatmap over the physical domain.
 *
 * Renders the solver's density matrix (rows over y, columns over x) to a
 * PNG, or to an SVG that embeds the PNG with axis annotations. A zero field
 * renders as a uniform image.
 */

import { DensityGrid, readDensity } from './csv.js';
import { viridis } from './colormap.js';
import { encodePng } from './png.js';
import { SvgDocument } from './svg.js';
import { formatTick } from './scales.js';

export function densityPng(grid: DensityGrid, scale = 4): Buffer {
  const [cols, rows] = grid.n;
  const width = cols * scale;
  const height = rows * scale;
  const values = grid.matrix;
  let max = 0;
  for (const row of values) for (const v of row) max = Math.max(max, v);
  const pixels = new Uint8Array(4 * width * height);
  for (let py = 0; py < height; py++) {
    // flip vertically so increasing y points up in the image
    const row = values[rows - 1 - Math.floor(py / scale)];
    for (let px = 0; px < width; px++) {
      const v = row[Math.floor(px / scale)];
      const [r, g, b] = viridis(max > 0 ? v / max : 0);
      const base = 4 * (py * width + px);
      pixels[base] = r;
      pixels[base + 1] = g;
      pixels[base + 2] = b;
      pixels[base + 3] = 255;
    }
  }
  return encodePng(pixels, width, height);
}

export function densitySvg(grid: DensityGrid, scale = 4): string {
  const [cols, rows] = grid.n;
  const margin = { left: 52, right: 16, top: 24, bottom: 36 };
  const imgW = cols * scale;
  const imgH = rows * scale;
  const doc = new SvgDocument(imgW + margin.left + margin.right, imgH + margin.top + margin.bottom);
  doc.image(margin.left, margin.top, imgW, imgH, densityPng(grid, scale).toString('base64'));
  const [xb, yb] = [grid.bounds[0], grid.bounds[grid.bounds.length - 1]];
  doc.text(margin.left, margin.top + imgH + 14, formatTick(xb[0]));
  doc.text(margin.left + imgW, margin.top + imgH + 14, formatTick(xb[1]), {
    'text-anchor': 'end',
  });
  doc.text(margin.left - 6, margin.top + imgH, formatTick(yb[0]), { 'text-anchor': 'end' });
  doc.text(margin.left - 6, margin.top + 10, formatTick(yb[1]), { 'text-anchor': 'end' });
  doc.text(margin.left + imgW / 2, 14, `density at t = ${formatTick(grid.t)}`, {
    'text-anchor': 'middle',
  });
  return doc.render();
}

export function plotDensity(path: string, format: 'png' | 'svg', scale = 4): Buffer | string {
  const grid = readDensity(path);
  return format === 'png' ? densityPng(grid, scale) : densitySvg(grid, scale);
}
