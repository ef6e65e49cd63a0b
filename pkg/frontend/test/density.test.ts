import { inflateSync } from 'node:zlib';

import { describe, expect, it } from 'vitest';

import { readDensity } from '../src/csv.js';
import { densityPng, densitySvg } from '../src/density.js';
import { encodePng } from '../src/png.js';
import { tempDir, writeDensityFixture } from './fixtures.js';

function pngDimensions(buf: Buffer): [number, number] {
  expect(buf.subarray(0, 8)).toEqual(Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]));
  expect(buf.subarray(12, 16).toString('ascii')).toBe('IHDR');
  return [buf.readUInt32BE(16), buf.readUInt32BE(20)];
}

function pngPixels(buf: Buffer, width: number, height: number): Buffer {
  // single IDAT chunk produced by our encoder
  const idatStart = buf.indexOf('IDAT');
  const length = buf.readUInt32BE(idatStart - 4);
  const raw = inflateSync(buf.subarray(idatStart + 4, idatStart + 4 + length));
  expect(raw.length).toBe((4 * width + 1) * height);
  return raw;
}

describe('png encoder', () => {
  it('produces a decodable image with correct dimensions and filter bytes', () => {
    const pixels = new Uint8Array(4 * 3 * 2);
    pixels.fill(255);
    pixels[0] = 10; // first pixel red channel
    const png = encodePng(pixels, 3, 2);
    expect(pngDimensions(png)).toEqual([3, 2]);
    const raw = pngPixels(png, 3, 2);
    expect(raw[0]).toBe(0); // filter type none
    expect(raw[1]).toBe(10);
    expect(png.subarray(png.length - 8).toString('ascii')).toContain('IEND');
  });

  it('rejects a mis-sized buffer', () => {
    expect(() => encodePng(new Uint8Array(5), 2, 2)).toThrow(/expected 16/);
  });
});

describe('density figures', () => {
  it('renders a zero field as a uniform image', () => {
    const dir = tempDir();
    const path = writeDensityFixture(dir, 'zero.csv', [
      [0, 0, 0],
      [0, 0, 0],
    ]);
    const png = densityPng(readDensity(path), 2);
    const [w, h] = pngDimensions(png);
    expect([w, h]).toEqual([6, 4]);
    const raw = pngPixels(png, w, h);
    const first = [raw[1], raw[2], raw[3]];
    for (let row = 0; row < h; row++) {
      for (let col = 0; col < w; col++) {
        const base = row * (4 * w + 1) + 1 + 4 * col;
        expect([raw[base], raw[base + 1], raw[base + 2]]).toEqual(first);
      }
    }
  });

  it('marks the density peak with the hot end of the colormap', () => {
    const dir = tempDir();
    const path = writeDensityFixture(dir, 'peak.csv', [
      [0, 0, 0],
      [0, 1, 0],
      [0, 0, 0],
    ]);
    const png = densityPng(readDensity(path), 1);
    const raw = pngPixels(png, 3, 3);
    const at = (row: number, col: number) => {
      const base = row * (4 * 3 + 1) + 1 + 4 * col;
      return [raw[base], raw[base + 1], raw[base + 2]];
    };
    expect(at(1, 1)).toEqual([253, 231, 37]); // viridis top stop
    expect(at(0, 0)).toEqual([68, 1, 84]); // viridis bottom stop
  });

  it('wraps the image with axis labels in svg format', () => {
    const dir = tempDir();
    const path = writeDensityFixture(dir, 'field.csv', [
      [0, 0.5],
      [1, 0],
    ], [[-2, 2], [-3, 3]]);
    const svg = densitySvg(readDensity(path), 2);
    expect(svg).toContain('data:image/png;base64,');
    expect(svg).toContain('-2');
    expect(svg).toContain('3');
    expect(svg).toContain('density at t = 0.5');
  });
});
