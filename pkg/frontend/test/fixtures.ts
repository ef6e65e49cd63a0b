/** Shared fixture writers producing files in the solver's CSV formats. */

import { mkdtempSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

export function tempDir(): string {
  return mkdtempSync(join(tmpdir(), 'gpshadow-figures-'));
}

export function writeSeriesFixture(dir: string, name: string, rows: number[][]): string {
  const header = 'n,t,mass,energy,eta,consistency_l2,consistency_h1,extended_energy';
  const lines = rows.map((r) => {
    const ext = r.length > 7 ? String(r[7]) : '';
    return `${r[0]},${r[1]},${r[2]},${r[3]},${r[4]},${r[5]},${r[6]},${ext}`;
  });
  const path = join(dir, name);
  writeFileSync(path, [header, ...lines].join('\n') + '\n');
  return path;
}

export function writeTableFixture(
  dir: string,
  name: string,
  rows: (string | number | null)[][],
): string {
  const header = 'scheme,tau,l2_error,h1_error,eta,fitted_rate';
  const lines = rows.map((r) => {
    const rate = r[5] === null ? '' : String(r[5]);
    return `${r[0]},${r[1]},${r[2]},${r[3]},${r[4]},${rate}`;
  });
  const path = join(dir, name);
  writeFileSync(path, [header, ...lines].join('\n') + '\n');
  return path;
}

export function writeDensityFixture(
  dir: string,
  name: string,
  matrix: number[][],
  bounds: [number, number][] = [
    [-6, 6],
    [-6, 6],
  ],
  headerN?: [number, number],
): string {
  const path = join(dir, name);
  writeFileSync(path, matrix.map((row) => row.join(',')).join('\n') + '\n');
  const n = headerN ?? [matrix[0].length, matrix.length];
  writeFileSync(
    path + '.json',
    JSON.stringify({ bounds, n, t: 0.5, kind: 'density', config_hash: '' }) + '\n',
  );
  return path;
}
