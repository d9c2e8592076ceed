/** SVG rendering of a Figure (deterministic string output). */

import { Figure, Panel, dataExtent, formatTick, linearScale, ticks } from "./plot.js";

const PANEL_W = 420;
const PANEL_H = 240;
const MARGIN = { left: 64, right: 16, top: 28, bottom: 40 };

const COLORS: Record<string, string> = { black: "#000000", gray: "#999999" };

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function renderPanel(panel: Panel, x0: number, y0: number): string {
  const iw = PANEL_W - MARGIN.left - MARGIN.right;
  const ih = PANEL_H - MARGIN.top - MARGIN.bottom;
  const xd = dataExtent(panel.series, "x");
  const yd = dataExtent(panel.series, "y");
  const sx = linearScale(xd, [x0 + MARGIN.left, x0 + MARGIN.left + iw]);
  const sy = linearScale(yd, [y0 + MARGIN.top + ih, y0 + MARGIN.top]);
  const parts: string[] = [];
  parts.push(`<rect x="${x0 + MARGIN.left}" y="${y0 + MARGIN.top}" width="${iw}" ` +
    `height="${ih}" fill="none" stroke="#000000" stroke-width="1"/>`);
  for (const t of ticks(sx.domain)) {
    const px = sx.map(t).toFixed(2);
    parts.push(`<line x1="${px}" y1="${y0 + MARGIN.top + ih}" x2="${px}" ` +
      `y2="${y0 + MARGIN.top + ih + 4}" stroke="#000000"/>`);
    parts.push(`<text x="${px}" y="${y0 + MARGIN.top + ih + 16}" font-size="11" ` +
      `text-anchor="middle" font-family="sans-serif">${esc(formatTick(t))}</text>`);
  }
  for (const t of ticks(sy.domain)) {
    const py = sy.map(t).toFixed(2);
    parts.push(`<line x1="${x0 + MARGIN.left - 4}" y1="${py}" ` +
      `x2="${x0 + MARGIN.left}" y2="${py}" stroke="#000000"/>`);
    parts.push(`<text x="${x0 + MARGIN.left - 6}" y="${py}" font-size="11" ` +
      `text-anchor="end" dominant-baseline="middle" font-family="sans-serif">` +
      `${esc(formatTick(t))}</text>`);
  }
  // gray first so the black series draws on top (overlay convention)
  const ordered = [...panel.series].sort((a, b) =>
    a.color === b.color ? 0 : a.color === "gray" ? -1 : 1);
  for (const s of ordered) {
    const pts: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      if (isFinite(s.x[i]) && isFinite(s.y[i])) {
        pts.push(`${sx.map(s.x[i]).toFixed(2)},${sy.map(s.y[i]).toFixed(2)}`);
      }
    }
    parts.push(`<polyline points="${pts.join(" ")}" fill="none" ` +
      `stroke="${COLORS[s.color] ?? s.color}" stroke-width="1"/>`);
  }
  parts.push(`<text x="${x0 + PANEL_W / 2}" y="${y0 + 16}" font-size="12" ` +
    `text-anchor="middle" font-family="sans-serif">${esc(panel.title)}</text>`);
  parts.push(`<text x="${x0 + MARGIN.left + iw / 2}" y="${y0 + PANEL_H - 6}" ` +
    `font-size="11" text-anchor="middle" font-family="sans-serif">` +
    `${esc(panel.xlabel)}</text>`);
  parts.push(`<text x="${x0 + 14}" y="${y0 + MARGIN.top + ih / 2}" font-size="11" ` +
    `text-anchor="middle" font-family="sans-serif" ` +
    `transform="rotate(-90 ${x0 + 14} ${y0 + MARGIN.top + ih / 2})">` +
    `${esc(panel.ylabel)}</text>`);
  if (panel.note) {
    parts.push(`<text x="${x0 + MARGIN.left + 6}" y="${y0 + MARGIN.top + 14}" ` +
      `font-size="10" font-family="sans-serif" fill="#555555">` +
      `${esc(panel.note)}</text>`);
  }
  return parts.join("\n");
}

export function renderSvg(fig: Figure): string {
  const cols = fig.columns;
  const rows = Math.ceil(fig.panels.length / cols);
  const w = cols * PANEL_W;
  const h = rows * PANEL_H;
  const body = fig.panels
    .map((p, i) => renderPanel(p, (i % cols) * PANEL_W, Math.floor(i / cols) * PANEL_H))
    .join("\n");
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${w}" height="${h}" ` +
    `viewBox="0 0 ${w} ${h}">\n<rect width="${w}" height="${h}" fill="#ffffff"/>\n` +
    `${body}\n</svg>\n`;
}
