#!/usr/bin/env node
/** render <campaign_dir> [--out dir] [--format png|svg] */

import * as fs from "node:fs";
import * as path from "node:path";

import { buildFigures } from "./figures.js";
import { renderPng } from "./raster.js";
import { renderSvg } from "./svg.js";

export interface RenderResult {
  written: string[];
  warnings: string[];
}

export function renderAll(campaignDir: string, outDir: string,
                          format: "png" | "svg"): RenderResult {
  const { figures, warnings } = buildFigures(campaignDir);
  fs.mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  for (const fig of figures) {
    const file = path.join(outDir, `${fig.name}.${format}`);
    if (format === "svg") {
      fs.writeFileSync(file, renderSvg(fig));
    } else {
      fs.writeFileSync(file, renderPng(fig));
    }
    written.push(file);
  }
  return { written, warnings };
}

export function main(argv: string[]): number {
  const args = [...argv];
  if (args[0] === "render") {
    args.shift();
  }
  let out: string | null = null;
  let format: "png" | "svg" = "png";
  const positional: string[] = [];
  for (let i = 0; i < args.length; i++) {
    if (args[i] === "--out") {
      out = args[++i];
    } else if (args[i] === "--format") {
      const f = args[++i];
      if (f !== "png" && f !== "svg") {
        console.error(`unknown format '${f}' (png|svg)`);
        return 2;
      }
      format = f;
    } else {
      positional.push(args[i]);
    }
  }
  if (positional.length !== 1) {
    console.error("usage: epslab-figures render <campaign_dir> [--out dir] [--format png|svg]");
    return 2;
  }
  const campaignDir = positional[0];
  if (!fs.existsSync(campaignDir)) {
    console.error(`campaign directory not found: ${campaignDir}`);
    return 2;
  }
  const res = renderAll(campaignDir, out ?? path.join(campaignDir, "figures"), format);
  for (const w of res.warnings) {
    console.warn(`warning: ${w}`);
  }
  console.log(`${res.written.length} figure(s) written` +
    (res.warnings.length ? `, ${res.warnings.length} warning(s)` : ""));
  for (const f of res.written) {
    console.log(`  ${f}`);
  }
  return 0;
}

if (process.argv[1] && /cli\.(ts|js)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
