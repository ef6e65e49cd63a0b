#!/usr/bin/env node
/** Figure CLI over the solver's CSV outputs.
 *
 *   gpshadow-figures convergence --table convergence.csv --out fig.svg
 *       [--column l2_error|h1_error|eta] [--guides tau2,tau32]
 *   gpshadow-figures timeseries --column energy --out fig.svg series1.csv series2.csv
 *       [--log-y]
 *   gpshadow-figures density --input density.csv --out fig.png [--scale 4]
 */

import { writeFileSync } from 'node:fs';

import { SeriesColumn } from './csv.js';
import { ConvergenceOptions, plotConvergence } from './convergence.js';
import { plotDensity } from './density.js';
import { plotTimeseries } from './timeseries.js';

interface Parsed {
  command: string;
  flags: Map<string, string | boolean>;
  positional: string[];
}

function parseArgs(argv: string[]): Parsed {
  const [command, ...rest] = argv;
  const flags = new Map<string, string | boolean>();
  const positional: string[] = [];
  for (let i = 0; i < rest.length; i++) {
    const arg = rest[i];
    if (arg.startsWith('--')) {
      const name = arg.slice(2);
      const next = rest[i + 1];
      if (next !== undefined && !next.startsWith('--')) {
        flags.set(name, next);
        i++;
      } else {
        flags.set(name, true);
      }
    } else {
      positional.push(arg);
    }
  }
  return { command: command ?? '', flags, positional };
}

function requireFlag(parsed: Parsed, name: string): string {
  const value = parsed.flags.get(name);
  if (typeof value !== 'string') throw new Error(`missing required --${name}`);
  return value;
}

export function main(argv: string[]): number {
  const parsed = parseArgs(argv);
  switch (parsed.command) {
    case 'convergence': {
      const out = requireFlag(parsed, 'out');
      const options: ConvergenceOptions = {};
      const column = parsed.flags.get('column');
      if (typeof column === 'string') options.column = column as ConvergenceOptions['column'];
      const guides = parsed.flags.get('guides');
      if (typeof guides === 'string') {
        options.guides = guides.split(',') as ConvergenceOptions['guides'];
      }
      writeFileSync(out, plotConvergence(requireFlag(parsed, 'table'), options));
      console.log(out);
      return 0;
    }
    case 'timeseries': {
      const out = requireFlag(parsed, 'out');
      if (parsed.positional.length === 0) throw new Error('no series CSV files given');
      const column = requireFlag(parsed, 'column') as SeriesColumn;
      const figure = plotTimeseries(parsed.positional, column, {
        logY: parsed.flags.get('log-y') === true,
      });
      writeFileSync(out, figure);
      console.log(out);
      return 0;
    }
    case 'density': {
      const out = requireFlag(parsed, 'out');
      const scaleFlag = parsed.flags.get('scale');
      const scale = typeof scaleFlag === 'string' ? Number(scaleFlag) : 4;
      const format = out.endsWith('.svg') ? 'svg' : 'png';
      writeFileSync(out, plotDensity(requireFlag(parsed, 'input'), format, scale));
      console.log(out);
      return 0;
    }
    default:
      console.error(
        'usage: gpshadow-figures <convergence|timeseries|density> [options]\n' +
        'see the header of cli.ts for the full flag list',
      );
      return 2;
  }
}

const invokedDirectly = process.argv[1]?.endsWith('cli.js') || process.argv[1]?.endsWith('cli.ts');
if (invokedDirectly) {
  try {
    process.exit(main(process.argv.slice(2)));
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    process.exit(1);
  }
}
