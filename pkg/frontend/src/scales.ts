/** Linear and log2 scales with tick helpers for hand-built SVG charts. */

export interface Scale {
  (value: number): number;
  ticks(): { value: number; label: string }[];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
  tickCount = 6,
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.ticks = () => {
    const step = niceStep(span / Math.max(1, tickCount));
    const start = Math.ceil(d0 / step) * step;
    const ticks = [];
    for (let v = start; v <= d1 + 1e-12 * Math.abs(span); v += step) {
      const value = Math.abs(v) < step * 1e-9 ? 0 : v;
      ticks.push({ value, label: formatTick(value) });
    }
    return ticks;
  };
  return scale;
}

/** Logarithmic scale labeled in powers of two, matching step-size sweeps. */
export function log2Scale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = [Math.log2(domain[0]), Math.log2(domain[1])];
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((Math.log2(value) - d0) / span) * (r1 - r0)) as Scale;
  scale.ticks = () => {
    const lo = Math.ceil(Math.min(d0, d1));
    const hi = Math.floor(Math.max(d0, d1));
    const step = Math.max(1, Math.round((hi - lo) / 8));
    const ticks = [];
    for (let e = lo; e <= hi; e += step) {
      ticks.push({ value: 2 ** e, label: `2^${e}` });
    }
    return ticks;
  };
  return scale;
}

function niceStep(raw: number): number {
  const power = 10 ** Math.floor(Math.log10(raw));
  const unit = raw / power;
  if (unit <= 1) return power;
  if (unit <= 2) return 2 * power;
  if (unit <= 5) return 5 * power;
  return 10 * power;
}

export function formatTick(value: number): string {
  if (value === 0) return '0';
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) return value.toExponential(1);
  return String(Number(value.toPrecision(6)));
}
