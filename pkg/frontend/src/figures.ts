/** The seven campaign figures: which CSV columns feed which panels.
 *
 * Grayscale convention from the published captions: black is the
 * extended-phase-space series, gray the traditional one; abscissas are days.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { Table, column, parseCsv } from "./csv.js";
import { Figure, Panel, Series } from "./plot.js";

export interface RenderPlan {
  figures: Figure[];
  warnings: string[];
}

function load(dir: string, name: string, warnings: string[]): Table | null {
  const p = path.join(dir, name);
  if (!fs.existsSync(p)) {
    warnings.push(`missing ${name}; skipping dependent figure`);
    return null;
  }
  try {
    return parseCsv(fs.readFileSync(p, "utf8"));
  } catch (err) {
    warnings.push(`unreadable ${name}: ${(err as Error).message}`);
    return null;
  }
}

function series(t: Table, xcol: string, ycol: string, color: string,
                yscale = 1): Series {
  return {
    x: column(t, xcol),
    y: column(t, ycol).map((v) => v * yscale),
    color,
  };
}

export function buildFigures(campaignDir: string): RenderPlan {
  const warnings: string[] = [];
  const figures: Figure[] = [];

  const epsO1 = load(campaignDir, "intrinsic_eps_o1_ut.csv", warnings);
  const epsO1T = load(campaignDir, "tdomain_eps_o1.csv", warnings);
  const classic = load(campaignDir, "classic_o1_cal.csv", warnings);
  const epsO2 = load(campaignDir, "intrinsic_eps_o2_ut.csv", warnings);
  const epsO2T = load(campaignDir, "tdomain_eps_o2.csv", warnings);

  // 1: RSS of the first-order theories, superimposed
  if (epsO1 && classic) {
    figures.push({
      name: "fig1_rss_order1",
      columns: 1,
      panels: [{
        title: "first-order RSS position errors",
        xlabel: "days",
        ylabel: "m",
        series: [series(classic, "t_days", "rss_m", "gray"),
                 series(epsO1, "t_days", "rss_m", "black")],
      }],
    });
  }

  // 2: intrinsic RSW errors, traditional left, extended phase space right
  if (epsO1 && classic) {
    const panels: Panel[] = [];
    for (const [comp, label] of [["radial_m", "radial (m)"],
                                 ["along_m", "along-track (m)"],
                                 ["cross_m", "cross-track (m)"]] as const) {
      panels.push({
        title: `traditional: ${label}`,
        xlabel: "days",
        ylabel: "m",
        series: [series(classic, "t_days", comp, "gray")],
      });
      panels.push({
        title: `extended phase space: ${label}`,
        xlabel: "days",
        ylabel: "m",
        series: [series(epsO1, "t_days", comp, "black")],
      });
    }
    figures.push({ name: "fig2_intrinsic_rsw_order1", columns: 2, panels });
  }

  // 3: physical-time determination error, first order
  if (epsO1) {
    figures.push({
      name: "fig3_timing_order1",
      columns: 1,
      panels: [{
        title: "first-order time determination error",
        xlabel: "days",
        ylabel: "ms",
        series: [series(epsO1, "t_days", "timing_err_s", "black", 1e3)],
      }],
    });
  }

  // 4: along-track with the physical time as argument, first order
  if (epsO1T && classic) {
    figures.push({
      name: "fig4_alongtrack_time_argument_order1",
      columns: 1,
      panels: [{
        title: "first-order along-track, physical time as argument",
        xlabel: "days",
        ylabel: "m",
        series: [series(classic, "t_days", "along_m", "gray"),
                 series(epsO1T, "t_days", "along_m", "black")],
      }],
    });
  }

  // 5: second-order along-track (traditional second order is out of scope)
  if (epsO2) {
    figures.push({
      name: "fig5_alongtrack_order2",
      columns: 1,
      panels: [{
        title: "second-order along-track errors",
        xlabel: "days",
        ylabel: "mm",
        note: "traditional second-order series not built (out of scope)",
        series: [series(epsO2, "t_days", "along_m", "black", 1e3)],
      }],
    });
  }

  // 6: physical-time determination error, second order
  if (epsO2) {
    figures.push({
      name: "fig6_timing_order2",
      columns: 1,
      panels: [{
        title: "second-order time determination error",
        xlabel: "days",
        ylabel: "us",
        series: [series(epsO2, "t_days", "timing_err_s", "black", 1e6)],
      }],
    });
  }

  // 7: second-order along-track with the physical time as argument,
  // superimposed on the intrinsic series
  if (epsO2T && epsO2) {
    figures.push({
      name: "fig7_alongtrack_time_argument_order2",
      columns: 1,
      panels: [{
        title: "second-order along-track, physical time as argument",
        xlabel: "days",
        ylabel: "mm",
        series: [series(epsO2, "t_days", "along_m", "gray", 1e3),
                 series(epsO2T, "t_days", "along_m", "black", 1e3)],
      }],
    });
  }

  return { figures, warnings };
}
