/** Observable time-series figure: one curve per series CSV (e.g. one per
 * step size), a chosen column on the y-axis. */

import { basename } from 'node:path';

import { SERIES_COLUMNS, SeriesColumn, readSeries } from './csv.js';
import { Curve, renderChart } from './lineplot.js';

export interface TimeseriesOptions {
  logY?: boolean;
  title?: string;
  labels?: string[];
}

export function timeseriesFigure(
  inputs: { label: string; rows: ReturnType<typeof readSeries> }[],
  column: SeriesColumn,
  options: TimeseriesOptions = {},
): string {
  if (!SERIES_COLUMNS.includes(column)) {
    throw new Error(`unknown series column '${column}'; expected one of ${SERIES_COLUMNS.join(', ')}`);
  }
  const curves: Curve[] = inputs.map(({ label, rows }) => ({
    label,
    markers: false,
    points: rows
      .filter((r) => r[column] !== null)
      .map((r) => [r.t, r[column] as number] as [number, number]),
  }));
  return renderChart(curves, {
    xLabel: 'time t',
    yLabel: column.replace('_', ' '),
    yLog: options.logY ?? false,
    title: options.title ?? `${column.replace('_', ' ')} over time`,
  });
}

export function plotTimeseries(
  seriesPaths: string[],
  column: SeriesColumn,
  options: TimeseriesOptions = {},
): string {
  const inputs = seriesPaths.map((path, i) => ({
    label: options.labels?.[i] ?? basename(path).replace(/^series_/, '').replace(/\.csv$/, ''),
    rows: readSeries(path),
  }));
  return timeseriesFigure(inputs, column, options);
}
