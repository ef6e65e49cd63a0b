/** Small SVG string builder: enough for axes, polylines, markers and text. */

export interface SvgAttrs {
  [key: string]: string | number;
}

function attrs(a: SvgAttrs): string {
  return Object.entries(a)
    .map(([k, v]) => ` ${k}="${String(v).replace(/"/g, '&quot;')}"`)
    .join('');
}

export function escapeText(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export class SvgDocument {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {}

  element(tag: string, a: SvgAttrs, content?: string): void {
    if (content === undefined) {
      this.parts.push(`<${tag}${attrs(a)}/>`);
    } else {
      this.parts.push(`<${tag}${attrs(a)}>${content}</${tag}>`);
    }
  }

  line(x1: number, y1: number, x2: number, y2: number, a: SvgAttrs = {}): void {
    this.element('line', { x1, y1, x2, y2, stroke: '#444', 'stroke-width': 1, ...a });
  }

  polyline(points: [number, number][], a: SvgAttrs = {}): void {
    const path = points.map(([x, y]) => `${round(x)},${round(y)}`).join(' ');
    this.element('polyline', { points: path, fill: 'none', 'stroke-width': 1.5, ...a });
  }

  circle(cx: number, cy: number, r: number, a: SvgAttrs = {}): void {
    this.element('circle', { cx: round(cx), cy: round(cy), r, ...a });
  }

  text(x: number, y: number, content: string, a: SvgAttrs = {}): void {
    this.element(
      'text',
      { x: round(x), y: round(y), 'font-family': 'sans-serif', 'font-size': 11, ...a },
      escapeText(content),
    );
  }

  image(x: number, y: number, w: number, h: number, pngBase64: string): void {
    this.element('image', {
      x, y, width: w, height: h,
      href: `data:image/png;base64,${pngBase64}`,
      preserveAspectRatio: 'none',
      style: 'image-rendering:pixelated',
    });
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join('\n') +
      '\n</svg>\n'
    );
  }
}

function round(v: number): number {
  return Math.round(v * 100) / 100;
}

export const CURVE_COLORS = [
  '#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b', '#e377c2', '#17becf',
];
