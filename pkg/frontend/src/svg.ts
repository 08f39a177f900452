/**
 * Deterministic SVG line-chart rendering: fixed layout, fixed palette,
 * no timestamps or randomness, so a given data set always produces the
 * same bytes.
 */

import { Curve } from "./figure.js";

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  logY: boolean;
  footer: string;
  clampNote?: string;
}

const WIDTH = 760;
const HEIGHT = 520;
const MARGIN = { left: 78, right: 24, top: 46, bottom: 88 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#e377c2",
  "#17becf",
];

function fmt(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 1e4 || abs < 1e-3) return value.toExponential(0).replace("+", "");
  return Number(value.toPrecision(6)).toString();
}

function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (lo === hi) {
    return [lo - 1, lo, lo + 1];
  }
  const span = hi - lo;
  const step0 = span / Math.max(count - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  let step = mag;
  for (const m of [1, 2, 2.5, 5, 10]) {
    if (mag * m >= step0) {
      step = mag * m;
      break;
    }
  }
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let t = start; t <= hi + 1e-9 * span; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return ticks;
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-12); Math.pow(10, e) <= hi * (1 + 1e-12); e++) {
    ticks.push(Math.pow(10, e));
  }
  if (ticks.length === 0) ticks.push(lo, hi);
  return ticks;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderChart(curves: Curve[], options: ChartOptions): string {
  const xs = curves.flatMap((c) => c.points.map((p) => p.x));
  const ys = curves.flatMap((c) => c.points.map((p) => p.y));
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  if (xLo === xHi) {
    xLo -= 1;
    xHi += 1;
  }
  let yLo = Math.min(...ys);
  let yHi = Math.max(...ys);
  if (options.logY) {
    yLo = Math.pow(10, Math.floor(Math.log10(yLo)));
    yHi = Math.pow(10, Math.ceil(Math.log10(yHi)));
    if (yLo === yHi) yHi = yLo * 10;
  } else if (yLo === yHi) {
    yLo -= 1;
    yHi += 1;
  } else {
    const pad = 0.06 * (yHi - yLo);
    yLo -= pad;
    yHi += pad;
  }

  const sx = (x: number) => MARGIN.left + ((x - xLo) / (xHi - xLo)) * PLOT_W;
  const sy = (y: number) => {
    const t = options.logY
      ? (Math.log10(y) - Math.log10(yLo)) / (Math.log10(yHi) - Math.log10(yLo))
      : (y - yLo) / (yHi - yLo);
    return MARGIN.top + (1 - t) * PLOT_H;
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16">` +
      `${escapeXml(options.title)}</text>`,
  );

  // Gridlines and ticks.
  const yTicks = options.logY ? decadeTicks(yLo, yHi) : niceTicks(yLo, yHi);
  for (const t of yTicks) {
    const y = sy(t).toFixed(2);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + PLOT_W}" y2="${y}" ` +
        `stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${y}" text-anchor="end" dominant-baseline="middle" ` +
        `font-size="11">${fmt(t)}</text>`,
    );
  }
  for (const t of niceTicks(xLo, xHi, 8)) {
    const x = sx(t).toFixed(2);
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top}" x2="${x}" y2="${MARGIN.top + PLOT_H}" ` +
        `stroke="#eeeeee" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${x}" y="${MARGIN.top + PLOT_H + 16}" text-anchor="middle" ` +
        `font-size="11">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${PLOT_W}" height="${PLOT_H}" ` +
      `fill="none" stroke="#333333"/>`,
  );

  // Curves with per-point markers; clamped points get an open triangle.
  curves.forEach((curve, index) => {
    const color = PALETTE[index % PALETTE.length];
    const coords = curve.points
      .map((p) => `${sx(p.x).toFixed(2)},${sy(p.y).toFixed(2)}`)
      .join(" ");
    parts.push(
      `<polyline points="${coords}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
    );
    for (const p of curve.points) {
      const x = sx(p.x);
      const y = sy(p.y);
      if (p.clamped) {
        const d = 5;
        parts.push(
          `<polygon points="${(x - d).toFixed(2)},${(y - d).toFixed(2)} ` +
            `${(x + d).toFixed(2)},${(y - d).toFixed(2)} ${x.toFixed(2)},${(y + d).toFixed(2)}" ` +
            `fill="white" stroke="${color}" stroke-width="1.5"/>`,
        );
      } else {
        parts.push(
          `<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="3.2" fill="${color}"/>`,
        );
      }
    }
  });

  // Legend, top-right inside the plot area.
  const legendX = MARGIN.left + PLOT_W - 230;
  curves.forEach((curve, index) => {
    const y = MARGIN.top + 14 + index * 18;
    const color = PALETTE[index % PALETTE.length];
    parts.push(
      `<line x1="${legendX}" y1="${y}" x2="${legendX + 26}" y2="${y}" ` +
        `stroke="${color}" stroke-width="2.5"/>`,
    );
    parts.push(
      `<text x="${legendX + 32}" y="${y + 4}" font-size="12">${escapeXml(curve.label)}</text>`,
    );
  });

  // Axis labels and footer.
  parts.push(
    `<text x="${MARGIN.left + PLOT_W / 2}" y="${MARGIN.top + PLOT_H + 40}" ` +
      `text-anchor="middle" font-size="13">${escapeXml(options.xLabel)}</text>`,
  );
  parts.push(
    `<text x="20" y="${MARGIN.top + PLOT_H / 2}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 20 ${MARGIN.top + PLOT_H / 2})">${escapeXml(options.yLabel)}</text>`,
  );
  const footer = options.clampNote
    ? `${options.footer}   ${options.clampNote}`
    : options.footer;
  parts.push(
    `<text x="${MARGIN.left}" y="${HEIGHT - 12}" font-size="10" fill="#666666">` +
      `${escapeXml(footer)}</text>`,
  );
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
