/** Readers for the solver's CSV outputs. Values are never recomputed here:
 * whatever a figure shows was read from these files. */

import { readFileSync } from 'node:fs';

export const SERIES_HEADER =
  'n,t,mass,energy,eta,consistency_l2,consistency_h1,extended_energy';
export const TABLE_HEADER = 'scheme,tau,l2_error,h1_error,eta,fitted_rate';

export interface SeriesRow {
  n: number;
  t: number;
  mass: number;
  energy: number;
  eta: number;
  consistency_l2: number;
  consistency_h1: number;
  extended_energy: number | null;
}

export const SERIES_COLUMNS = [
  'mass', 'energy', 'eta', 'consistency_l2', 'consistency_h1', 'extended_energy',
] as const;
export type SeriesColumn = (typeof SERIES_COLUMNS)[number];

export interface TableRow {
  scheme: string;
  tau: number;
  l2_error: number;
  h1_error: number;
  eta: number;
  /** Rate between adjacent step sizes, kept verbatim for exact annotation. */
  fitted_rate: string | null;
}

export interface DensityGrid {
  /** matrix[row][col] with rows over the second coordinate (y). */
  matrix: number[][];
  bounds: [number, number][];
  n: [number, number];
  t: number;
}

function splitLines(text: string): string[] {
  return text.split('\n').filter((line) => line.length > 0);
}

export function readSeries(path: string): SeriesRow[] {
  const lines = splitLines(readFileSync(path, 'utf-8'));
  if (lines[0] !== SERIES_HEADER) {
    throw new Error(`${path}: expected series header '${SERIES_HEADER}', got '${lines[0]}'`);
  }
  return lines.slice(1).map((line) => {
    const parts = line.split(',');
    if (parts.length !== 8) throw new Error(`${path}: malformed series row '${line}'`);
    return {
      n: Number(parts[0]),
      t: Number(parts[1]),
      mass: Number(parts[2]),
      energy: Number(parts[3]),
      eta: Number(parts[4]),
      consistency_l2: Number(parts[5]),
      consistency_h1: Number(parts[6]),
      extended_energy: parts[7] === '' ? null : Number(parts[7]),
    };
  });
}

export function readTable(path: string): TableRow[] {
  const lines = splitLines(readFileSync(path, 'utf-8'));
  if (lines[0] !== TABLE_HEADER) {
    throw new Error(`${path}: expected table header '${TABLE_HEADER}', got '${lines[0]}'`);
  }
  return lines.slice(1).map((line) => {
    const parts = line.split(',');
    if (parts.length !== 6) throw new Error(`${path}: malformed table row '${line}'`);
    return {
      scheme: parts[0],
      tau: Number(parts[1]),
      l2_error: Number(parts[2]),
      h1_error: Number(parts[3]),
      eta: Number(parts[4]),
      fitted_rate: parts[5] === '' ? null : parts[5],
    };
  });
}

/** Density matrix CSV plus its JSON sidecar (`<path>.json`). */
export function readDensity(path: string): DensityGrid {
  const header = JSON.parse(readFileSync(path + '.json', 'utf-8'));
  const bounds = header.bounds as [number, number][];
  const n = header.n as number[];
  const matrix = splitLines(readFileSync(path, 'utf-8')).map((line) =>
    line.split(',').map(Number),
  );
  const rows = n.length > 1 ? n[1] : 1;
  const cols = n[0];
  if (matrix.length !== rows || matrix.some((r) => r.length !== cols)) {
    throw new Error(
      `${path}: matrix is ${matrix.length}x${matrix[0]?.length ?? 0}, header says ${rows}x${cols}`,
    );
  }
  return { matrix, bounds, n: [cols, rows], t: Number(header.t ?? 0) };
}
