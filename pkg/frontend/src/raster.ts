/** Self-contained rasterizer and PNG encoder (node:zlib only): grayscale
 * line plots with a 5x7 bitmap font, so PNG output needs no native canvas. */

import * as zlib from "node:zlib";

import { Figure, Panel, dataExtent, formatTick, linearScale, ticks } from "./plot.js";

const PANEL_W = 420;
const PANEL_H = 240;
const MARGIN = { left: 64, right: 16, top: 28, bottom: 40 };

/** 5x7 glyphs, row-major bits (left = MSB of the 5-bit row). */
const FONT: Record<string, number[]> = {
  "0": [0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e],
  "1": [0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e],
  "2": [0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f],
  "3": [0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e],
  "4": [0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02],
  "5": [0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e],
  "6": [0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e],
  "7": [0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
  "8": [0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e],
  "9": [0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c],
  ".": [0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x0c],
  "-": [0x00, 0x00, 0x00, 0x1f, 0x00, 0x00, 0x00],
  "+": [0x00, 0x04, 0x04, 0x1f, 0x04, 0x04, 0x00],
  "/": [0x01, 0x01, 0x02, 0x04, 0x08, 0x10, 0x10],
  "(": [0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02],
  ")": [0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08],
  ",": [0x00, 0x00, 0x00, 0x00, 0x0c, 0x04, 0x08],
  ":": [0x00, 0x0c, 0x0c, 0x00, 0x0c, 0x0c, 0x00],
  " ": [0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00],
  a: [0x00, 0x00, 0x0e, 0x01, 0x0f, 0x11, 0x0f],
  b: [0x10, 0x10, 0x1e, 0x11, 0x11, 0x11, 0x1e],
  c: [0x00, 0x00, 0x0e, 0x11, 0x10, 0x11, 0x0e],
  d: [0x01, 0x01, 0x0f, 0x11, 0x11, 0x11, 0x0f],
  e: [0x00, 0x00, 0x0e, 0x11, 0x1f, 0x10, 0x0e],
  f: [0x06, 0x08, 0x1c, 0x08, 0x08, 0x08, 0x08],
  g: [0x00, 0x0f, 0x11, 0x11, 0x0f, 0x01, 0x0e],
  h: [0x10, 0x10, 0x1e, 0x11, 0x11, 0x11, 0x11],
  i: [0x04, 0x00, 0x0c, 0x04, 0x04, 0x04, 0x0e],
  k: [0x10, 0x10, 0x12, 0x14, 0x18, 0x14, 0x12],
  l: [0x0c, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0e],
  m: [0x00, 0x00, 0x1a, 0x15, 0x15, 0x15, 0x15],
  n: [0x00, 0x00, 0x1e, 0x11, 0x11, 0x11, 0x11],
  o: [0x00, 0x00, 0x0e, 0x11, 0x11, 0x11, 0x0e],
  p: [0x00, 0x1e, 0x11, 0x11, 0x1e, 0x10, 0x10],
  r: [0x00, 0x00, 0x16, 0x18, 0x10, 0x10, 0x10],
  s: [0x00, 0x00, 0x0f, 0x10, 0x0e, 0x01, 0x1e],
  t: [0x08, 0x08, 0x1c, 0x08, 0x08, 0x09, 0x06],
  u: [0x00, 0x00, 0x11, 0x11, 0x11, 0x13, 0x0d],
  v: [0x00, 0x00, 0x11, 0x11, 0x11, 0x0a, 0x04],
  w: [0x00, 0x00, 0x15, 0x15, 0x15, 0x15, 0x0a],
  x: [0x00, 0x00, 0x11, 0x0a, 0x04, 0x0a, 0x11],
  y: [0x00, 0x11, 0x11, 0x11, 0x0f, 0x01, 0x0e],
  z: [0x00, 0x00, 0x1f, 0x02, 0x04, 0x08, 0x1f],
  R: [0x1e, 0x11, 0x11, 0x1e, 0x14, 0x12, 0x11],
  S: [0x0f, 0x10, 0x10, 0x0e, 0x01, 0x01, 0x1e],
  N: [0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11],
  E: [0x1f, 0x10, 0x10, 0x1e, 0x10, 0x10, 0x1f],
  P: [0x1e, 0x11, 0x11, 0x1e, 0x10, 0x10, 0x10],
};

export class Canvas {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array; // grayscale

  constructor(width: number, height: number) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height).fill(255);
  }

  set(x: number, y: number, shade: number): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi >= 0 && xi < this.width && yi >= 0 && yi < this.height) {
      const idx = yi * this.width + xi;
      this.data[idx] = Math.min(this.data[idx], shade);
    }
  }

  line(x0: number, y0: number, x1: number, y1: number, shade: number): void {
    const dx = x1 - x0;
    const dy = y1 - y0;
    const steps = Math.max(Math.abs(dx), Math.abs(dy), 1);
    for (let i = 0; i <= steps; i++) {
      this.set(x0 + (dx * i) / steps, y0 + (dy * i) / steps, shade);
    }
  }

  text(x: number, y: number, s: string, shade = 0, anchor: "start" | "middle" | "end" = "start"): void {
    const w = s.length * 6;
    let px = anchor === "middle" ? x - w / 2 : anchor === "end" ? x - w : x;
    for (const ch of s) {
      const glyph = FONT[ch] ?? FONT[ch.toLowerCase()] ?? FONT[" "];
      for (let r = 0; r < 7; r++) {
        for (let c = 0; c < 5; c++) {
          if ((glyph[r] >> (4 - c)) & 1) {
            this.set(px + c, y - 6 + r, shade);
          }
        }
      }
      px += 6;
    }
  }
}

// --- PNG encoding (8-bit grayscale, zlib from node core) -------------------

const CRC_TABLE = (() => {
  const t = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    t[n] = c >>> 0;
  }
  return t;
})();

function crc32(buf: Uint8Array): number {
  let c = 0xffffffff;
  for (const b of buf) {
    c = CRC_TABLE[(c ^ b) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, payload: Uint8Array): Buffer {
  const head = Buffer.alloc(8);
  head.writeUInt32BE(payload.length, 0);
  head.write(type, 4, "ascii");
  const body = Buffer.concat([Buffer.from(type, "ascii"), Buffer.from(payload)]);
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(body), 0);
  return Buffer.concat([head, Buffer.from(payload), crc]);
}

export function encodePng(canvas: Canvas): Buffer {
  const { width, height, data } = canvas;
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr[8] = 8;  // bit depth
  ihdr[9] = 0;  // grayscale
  const raw = Buffer.alloc(height * (width + 1));
  for (let y = 0; y < height; y++) {
    raw[y * (width + 1)] = 0; // filter: none
    Buffer.from(data.subarray(y * width, (y + 1) * width)).copy(raw, y * (width + 1) + 1);
  }
  const idat = zlib.deflateSync(raw, { level: 9 });
  return Buffer.concat([
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk("IHDR", ihdr),
    chunk("IDAT", idat),
    chunk("IEND", new Uint8Array(0)),
  ]);
}

// --- figure rasterization ---------------------------------------------------

function drawPanel(cv: Canvas, panel: Panel, x0: number, y0: number): void {
  const iw = PANEL_W - MARGIN.left - MARGIN.right;
  const ih = PANEL_H - MARGIN.top - MARGIN.bottom;
  const xd = dataExtent(panel.series, "x");
  const yd = dataExtent(panel.series, "y");
  const sx = linearScale(xd, [x0 + MARGIN.left, x0 + MARGIN.left + iw]);
  const sy = linearScale(yd, [y0 + MARGIN.top + ih, y0 + MARGIN.top]);
  cv.line(sx.range[0], sy.range[1], sx.range[1], sy.range[1], 0);
  cv.line(sx.range[0], sy.range[0], sx.range[1], sy.range[0], 0);
  cv.line(sx.range[0], sy.range[1], sx.range[0], sy.range[0], 0);
  cv.line(sx.range[1], sy.range[1], sx.range[1], sy.range[0], 0);
  for (const t of ticks(sx.domain)) {
    const px = sx.map(t);
    cv.line(px, sy.range[0], px, sy.range[0] + 4, 0);
    cv.text(px, sy.range[0] + 16, formatTick(t), 0, "middle");
  }
  for (const t of ticks(sy.domain)) {
    const py = sy.map(t);
    cv.line(sx.range[0] - 4, py, sx.range[0], py, 0);
    cv.text(sx.range[0] - 6, py + 3, formatTick(t), 0, "end");
  }
  const ordered = [...panel.series].sort((a, b) =>
    a.color === b.color ? 0 : a.color === "gray" ? -1 : 1);
  for (const s of ordered) {
    const shade = s.color === "gray" ? 150 : 0;
    let last: [number, number] | null = null;
    for (let i = 0; i < s.x.length; i++) {
      if (!isFinite(s.x[i]) || !isFinite(s.y[i])) {
        last = null;
        continue;
      }
      const p: [number, number] = [sx.map(s.x[i]), sy.map(s.y[i])];
      if (last) {
        cv.line(last[0], last[1], p[0], p[1], shade);
      }
      last = p;
    }
  }
  cv.text(x0 + PANEL_W / 2, y0 + 16, panel.title, 0, "middle");
  cv.text(x0 + MARGIN.left + iw / 2, y0 + PANEL_H - 8, panel.xlabel, 0, "middle");
  cv.text(x0 + 4, y0 + 12, panel.ylabel, 0, "start");
  if (panel.note) {
    cv.text(x0 + MARGIN.left + 6, y0 + MARGIN.top + 12, panel.note, 100, "start");
  }
}

export function renderPng(fig: Figure): Buffer {
  const cols = fig.columns;
  const rows = Math.ceil(fig.panels.length / cols);
  const cv = new Canvas(cols * PANEL_W, rows * PANEL_H);
  fig.panels.forEach((p, i) =>
    drawPanel(cv, p, (i % cols) * PANEL_W, Math.floor(i / cols) * PANEL_H));
  return encodePng(cv);
}
