/** Figure/panel data model and axis machinery (scales, tick placement). */

export interface Series {
  x: number[];
  y: number[];
  color: string; // "black" = extended-phase-space, "gray" = traditional
}

export interface Panel {
  title: string;
  xlabel: string;
  ylabel: string;
  series: Series[];
  note?: string;
}

export interface Figure {
  name: string;
  panels: Panel[];
  /** panel grid columns (rows derived) */
  columns: number;
}

export interface LinearScale {
  domain: [number, number];
  range: [number, number];
  map(v: number): number;
}

export function linearScale(domain: [number, number], range: [number, number]): LinearScale {
  let [d0, d1] = domain;
  if (d0 === d1) {
    d0 -= 1;
    d1 += 1;
  }
  const k = (range[1] - range[0]) / (d1 - d0);
  return {
    domain: [d0, d1],
    range,
    map: (v: number) => range[0] + (v - d0) * k,
  };
}

/** Nice tick positions covering the domain (1/2/5 ladder). */
export function ticks(domain: [number, number], target = 6): number[] {
  const span = domain[1] - domain[0];
  if (!(span > 0) || !isFinite(span)) {
    return [domain[0]];
  }
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  const out: number[] = [];
  const first = Math.ceil(domain[0] / step) * step;
  for (let v = first; v <= domain[1] + 1e-12 * span; v += step) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    return v.toExponential(1).replace("e-", "e-").replace("e+", "e");
  }
  const s = v.toPrecision(4);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}

export function dataExtent(series: Series[], axis: "x" | "y"): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    const arr = axis === "x" ? s.x : s.y;
    for (const v of arr) {
      if (isFinite(v)) {
        lo = Math.min(lo, v);
        hi = Math.max(hi, v);
      }
    }
  }
  if (!isFinite(lo)) {
    return [0, 1];
  }
  if (axis === "y") {
    const pad = 0.05 * (hi - lo || Math.abs(hi) || 1);
    return [lo - pad, hi + pad];
  }
  return [lo, hi];
}
