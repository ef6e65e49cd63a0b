/** Log-log convergence figure from a convergence table CSV.
 *
 * One curve per scheme with the final fitted rate annotated verbatim from
 * the table (never refitted here), plus dashed tau^2 and optional tau^(3/2)
 * reference guides anchored to the first curve.
 */

import { TableRow, readTable } from './csv.js';
import { Curve, renderChart } from './lineplot.js';

export type ErrorColumn = 'l2_error' | 'h1_error' | 'eta';

export interface ConvergenceOptions {
  column?: ErrorColumn;
  guides?: ('tau2' | 'tau32')[];
  title?: string;
}

export function convergenceFigure(rows: TableRow[], options: ConvergenceOptions = {}): string {
  if (rows.length === 0) throw new Error('empty convergence table');
  const column = options.column ?? 'l2_error';
  const schemes = [...new Set(rows.map((r) => r.scheme))];
  const curves: Curve[] = schemes.map((scheme) => {
    const mine = rows
      .filter((r) => r.scheme === scheme && Number.isFinite(r[column]) && r[column] > 0)
      .sort((a, b) => b.tau - a.tau);
    const lastRate = [...mine].reverse().find((r) => r.fitted_rate !== null)?.fitted_rate;
    return {
      label: scheme,
      points: mine.map((r) => [r.tau, r[column]] as [number, number]),
      annotation: lastRate != null ? `rate ${lastRate}` : undefined,
    };
  });
  const anchor = curves.find((c) => c.points.length > 0);
  if (!anchor) throw new Error('convergence table has no plottable rows');

  for (const guide of options.guides ?? ['tau2']) {
    const order = guide === 'tau2' ? 2.0 : 1.5;
    const [tau0, err0] = anchor.points[0];
    curves.push({
      label: guide === 'tau2' ? 'slope 2' : 'slope 3/2',
      dashed: true,
      points: anchor.points.map(([tau]) => [tau, err0 * (tau / tau0) ** order]),
    });
  }
  return renderChart(curves, {
    xLabel: 'step size tau',
    yLabel: column.replace('_', ' '),
    xLog: true,
    yLog: true,
    title: options.title ?? `Final-time ${column.replace('_', ' ')} vs step size`,
  });
}

export function plotConvergence(tablePath: string, options: ConvergenceOptions = {}): string {
  return convergenceFigure(readTable(tablePath), options);
}
