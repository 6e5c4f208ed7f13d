/** Tiny software canvas with data-space axes. */

import { encodePng } from "./png.js";

export type Color = [number, number, number, number];

export const WHITE: Color = [255, 255, 255, 255];
export const BLACK: Color = [20, 20, 20, 255];
export const GREY: Color = [200, 200, 200, 255];
export const FILL: Color = [120, 160, 210, 255];
export const BARRIER: Color = [200, 40, 30, 255];
export const MARKER: Color = [220, 120, 20, 255];
export const SERIES: Color[] = [
  [40, 90, 170, 255],
  [190, 60, 40, 255],
  [40, 140, 70, 255],
  [140, 80, 170, 255],
  [170, 130, 30, 255],
];

export class Raster {
  readonly data: Uint8Array;

  constructor(
    readonly width: number,
    readonly height: number,
    background: Color = WHITE,
  ) {
    this.data = new Uint8Array(width * height * 4);
    for (let i = 0; i < width * height; i++) {
      this.data.set(background, i * 4);
    }
  }

  set(x: number, y: number, c: Color): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    this.data.set(c, (y * this.width + x) * 4);
  }

  fillRect(x0: number, y0: number, x1: number, y1: number, c: Color): void {
    const xa = Math.max(0, Math.min(x0, x1));
    const xb = Math.min(this.width - 1, Math.max(x0, x1));
    const ya = Math.max(0, Math.min(y0, y1));
    const yb = Math.min(this.height - 1, Math.max(y0, y1));
    for (let y = ya; y <= yb; y++) {
      for (let x = xa; x <= xb; x++) {
        this.data.set(c, (y * this.width + x) * 4);
      }
    }
  }

  line(x0: number, y0: number, x1: number, y1: number, c: Color): void {
    let [xa, ya] = [Math.round(x0), Math.round(y0)];
    const [xb, yb] = [Math.round(x1), Math.round(y1)];
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(xa, ya, c);
      if (xa === xb && ya === yb) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        xa += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ya += sy;
      }
    }
  }

  disc(cx: number, cy: number, r: number, c: Color): void {
    for (let y = -r; y <= r; y++) {
      for (let x = -r; x <= r; x++) {
        if (x * x + y * y <= r * r) this.set(cx + x, cy + y, c);
      }
    }
  }

  png(): Buffer {
    return encodePng(this.width, this.height, this.data);
  }
}

/** Affine map from data coordinates to a pixel viewport (y grows upward). */
export class Axes {
  constructor(
    readonly raster: Raster,
    readonly x0: number,
    readonly x1: number,
    readonly y0: number,
    readonly y1: number,
    readonly margin = 40,
  ) {}

  px(x: number): number {
    const w = this.raster.width - 2 * this.margin;
    return Math.round(this.margin + ((x - this.x0) / (this.x1 - this.x0)) * w);
  }

  py(y: number): number {
    const h = this.raster.height - 2 * this.margin;
    return Math.round(this.raster.height - this.margin - ((y - this.y0) / (this.y1 - this.y0)) * h);
  }

  frame(): void {
    const r = this.raster;
    const m = this.margin;
    r.line(m, m, m, r.height - m, BLACK);
    r.line(m, r.height - m, r.width - m, r.height - m, BLACK);
    for (let k = 0; k <= 8; k++) {
      const x = this.x0 + ((this.x1 - this.x0) * k) / 8;
      const y = this.y0 + ((this.y1 - this.y0) * k) / 8;
      r.line(this.px(x), r.height - m, this.px(x), r.height - m + 4, BLACK);
      r.line(m - 4, this.py(y), m, this.py(y), BLACK);
    }
  }

  polyline(points: Array<[number, number]>, c: Color): void {
    for (let i = 1; i < points.length; i++) {
      this.raster.line(
        this.px(points[i - 1][0]),
        this.py(points[i - 1][1]),
        this.px(points[i][0]),
        this.py(points[i][1]),
        c,
      );
    }
  }
}
