/** Generic multi-curve chart on linear or log2 axes, with optional dashed
 * guide lines and per-curve annotations. */

import { Scale, linearScale, log2Scale } from './scales.js';
import { CURVE_COLORS, SvgDocument } from './svg.js';

export interface Curve {
  label: string;
  points: [number, number][];
  /** Extra text drawn next to the final point (e.g. a fitted slope). */
  annotation?: string;
  dashed?: boolean;
  markers?: boolean;
}

export interface ChartOptions {
  width?: number;
  height?: number;
  xLabel: string;
  yLabel: string;
  xLog?: boolean;
  yLog?: boolean;
  title?: string;
}

const MARGIN = { left: 64, right: 150, top: 28, bottom: 44 };

export function renderChart(curves: Curve[], options: ChartOptions): string {
  if (curves.length === 0 || curves.every((c) => c.points.length === 0)) {
    throw new Error('nothing to plot: no curves with data points');
  }
  const width = options.width ?? 640;
  const height = options.height ?? 420;
  const plotW: [number, number] = [MARGIN.left, width - MARGIN.right];
  const plotH: [number, number] = [height - MARGIN.bottom, MARGIN.top];

  const xs = curves.flatMap((c) => c.points.map((p) => p[0]));
  const ys = curves.flatMap((c) => c.points.map((p) => p[1]));
  const x = makeScale(extent(xs, options.xLog), plotW, options.xLog);
  const y = makeScale(extent(ys, options.yLog), plotH, options.yLog);

  const doc = new SvgDocument(width, height);
  drawAxes(doc, x, y, plotW, plotH, options);

  curves.forEach((curve, index) => {
    const color = CURVE_COLORS[index % CURVE_COLORS.length];
    const pts = curve.points
      .filter(([px, py]) => isPlottable(px, options.xLog) && isPlottable(py, options.yLog))
      .map(([px, py]) => [x(px), y(py)] as [number, number]);
    if (pts.length === 0) return;
    doc.polyline(pts, {
      stroke: color,
      ...(curve.dashed ? { 'stroke-dasharray': '6 4' } : {}),
    });
    if (curve.markers !== false && !curve.dashed) {
      for (const [px, py] of pts) doc.circle(px, py, 2.6, { fill: color });
    }
    const legendY = MARGIN.top + 14 + index * 16;
    doc.line(width - MARGIN.right + 10, legendY - 4, width - MARGIN.right + 34, legendY - 4, {
      stroke: color,
      'stroke-width': 2,
      ...(curve.dashed ? { 'stroke-dasharray': '6 4' } : {}),
    });
    doc.text(width - MARGIN.right + 40, legendY, curve.label);
    if (curve.annotation) {
      const [lastX, lastY] = pts[pts.length - 1];
      doc.text(Math.min(lastX + 6, width - MARGIN.right + 4), lastY - 6, curve.annotation, {
        fill: color,
        'font-size': 10,
      });
    }
  });

  if (options.title) {
    doc.text(width / 2, 16, options.title, { 'text-anchor': 'middle', 'font-size': 13 });
  }
  return doc.render();
}

function makeScale(domain: [number, number], range: [number, number], log?: boolean): Scale {
  return log ? log2Scale(domain, range) : linearScale(domain, range);
}

function isPlottable(value: number, log?: boolean): boolean {
  return Number.isFinite(value) && (!log || value > 0);
}

function extent(values: number[], log?: boolean): [number, number] {
  const usable = values.filter((v) => isPlottable(v, log));
  if (usable.length === 0) throw new Error('no finite data to plot');
  let lo = Math.min(...usable);
  let hi = Math.max(...usable);
  if (lo === hi) {
    lo = log ? lo / 2 : lo - 1;
    hi = log ? hi * 2 : hi + 1;
  }
  return [lo, hi];
}

function drawAxes(
  doc: SvgDocument,
  x: Scale,
  y: Scale,
  plotW: [number, number],
  plotH: [number, number],
  options: ChartOptions,
): void {
  const [left, right] = plotW;
  const [bottom, top] = plotH;
  doc.line(left, bottom, right, bottom);
  doc.line(left, bottom, left, top);
  for (const tick of x.ticks()) {
    const px = x(tick.value);
    if (px < left - 0.5 || px > right + 0.5) continue;
    doc.line(px, bottom, px, top, { stroke: '#eee' });
    doc.line(px, bottom, px, bottom + 4);
    doc.text(px, bottom + 16, tick.label, { 'text-anchor': 'middle' });
  }
  for (const tick of y.ticks()) {
    const py = y(tick.value);
    if (py > bottom + 0.5 || py < top - 0.5) continue;
    doc.line(left, py, right, py, { stroke: '#eee' });
    doc.line(left - 4, py, left, py);
    doc.text(left - 7, py + 3, tick.label, { 'text-anchor': 'end' });
  }
  doc.text((left + right) / 2, doc.height - 8, options.xLabel, { 'text-anchor': 'middle' });
  doc.element(
    'text',
    {
      x: 0, y: 0, 'font-family': 'sans-serif', 'font-size': 11, 'text-anchor': 'middle',
      transform: `translate(14 ${(bottom + top) / 2}) rotate(-90)`,
    },
    options.yLabel,
  );
}
