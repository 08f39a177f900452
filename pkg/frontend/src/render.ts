/** Figure orchestration: read a sweep CSV, build curves, write one SVG. */

import { createHash } from "node:crypto";
import { readFileSync, writeFileSync } from "node:fs";

import { parseCsv } from "./csv.js";
import {
  buildCurves,
  FIGURE_DEFINITIONS,
  FigureSpec,
  filterRows,
} from "./figure.js";
import { renderChart } from "./svg.js";

export function renderToString(spec: FigureSpec, csvText: string): string {
  const def = FIGURE_DEFINITIONS[spec.kind];
  const rows = parseCsv(csvText);
  const curves = buildCurves(filterRows(rows, spec), spec);
  const logY = spec.logY ?? def.defaultLogY;
  const hash = createHash("sha256").update(csvText).digest("hex").slice(0, 16);
  const clamped = curves.some((c) => c.points.some((p) => p.clamped));
  return renderChart(curves, {
    title: def.title,
    xLabel: def.xLabel,
    yLabel: def.yLabel + (logY && spec.kind !== "mse" ? " (log scale)" : ""),
    logY,
    footer: `source: ${rows.length} sweep cells, data sha256 ${hash}`,
    clampNote: clamped
      ? `open triangle: zero cells clamped to ${def.zeroClamp}`
      : undefined,
  });
}

/** Render the figure described by ``spec`` from its input CSV file. */
export function render(spec: FigureSpec): void {
  const csvText = readFileSync(spec.inputPath, "utf-8");
  const svg = renderToString(spec, csvText);
  writeFileSync(spec.outputPath, svg, "utf-8");
}
