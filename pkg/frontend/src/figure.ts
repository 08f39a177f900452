/**
 * Figure definitions: which CSV column each figure kind plots, over which
 * axis, with which scale, and how rows group into curves.
 *
 * Curves carry one point per x value for one (estimator, dfo_method)
 * group.  All statistics come from the harness; this layer only filters,
 * groups and transforms units for display.
 */

import { ColumnName, SweepRow } from "./schema.js";

export type FigureKind = "dfo_err" | "mse" | "ber" | "tp";

export interface FigureSpec {
  kind: FigureKind;
  inputPath: string;
  outputPath: string;
  /** Keep only rows for these estimators (default: all present). */
  estimators?: string[];
  /**
   * Keep only rows at this track position.  A number selects the nearest
   * distinct position in the file; "p3db" requires the file to contain a
   * single position (the fixed-position benchmark CSVs do).
   */
  position?: number | "p3db";
  /** Override the default y-axis scale of the figure kind. */
  logY?: boolean;
}

export interface FigureDefinition {
  metric: ColumnName;
  xColumn: "snr_db" | "position_m";
  xLabel: string;
  yLabel: string;
  title: string;
  defaultLogY: boolean;
  /** Clamp floor for log display of exact zeros (BER cells). */
  zeroClamp?: number;
}

export const FIGURE_DEFINITIONS: Record<FigureKind, FigureDefinition> = {
  dfo_err: {
    metric: "dfo_rel_err_mean",
    xColumn: "snr_db",
    xLabel: "SNR (dB)",
    yLabel: "DFO relative error (mean / max DFO)",
    title: "Doppler offset estimation error",
    defaultLogY: true,
  },
  mse: {
    metric: "mse_db",
    xColumn: "snr_db",
    xLabel: "SNR (dB)",
    yLabel: "channel estimation MSE (dB)",
    title: "Channel estimation MSE",
    defaultLogY: false, // the dB unit is already a log scale
  },
  ber: {
    metric: "ber",
    xColumn: "snr_db",
    xLabel: "SNR (dB)",
    yLabel: "bit error rate",
    title: "Uncoded bit error rate",
    defaultLogY: true,
    zeroClamp: 1e-7,
  },
  tp: {
    metric: "tp_bits_per_symbol",
    xColumn: "position_m",
    xLabel: "track position (m)",
    yLabel: "throughput proxy (bits/symbol)",
    title: "Throughput proxy along the track",
    defaultLogY: false,
  },
};

export class SelectionError extends Error {}

export interface CurvePoint {
  x: number;
  y: number;
  clamped: boolean;
}

export interface Curve {
  label: string;
  points: CurvePoint[];
}

function distinct(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

function describeGroups(rows: SweepRow[]): string {
  const estimators = [...new Set(rows.map((r) => r.estimator))].sort();
  const positions = distinct(rows.map((r) => r.position_m));
  return (
    `available estimators: ${estimators.join(", ") || "(none)"}; ` +
    `positions: ${positions.map((p) => p.toPrecision(6)).join(", ") || "(none)"}`
  );
}

export function filterRows(rows: SweepRow[], spec: FigureSpec): SweepRow[] {
  let kept = rows;
  if (spec.estimators !== undefined) {
    const want = new Set(spec.estimators);
    kept = kept.filter((r) => want.has(r.estimator));
  }
  if (spec.position !== undefined) {
    const positions = distinct(kept.map((r) => r.position_m));
    if (spec.position === "p3db") {
      if (positions.length > 1) {
        throw new SelectionError(
          `"p3db" needs a single-position CSV, but the file has ` +
            `${positions.length} positions. ${describeGroups(rows)}`,
        );
      }
    } else {
      const target = spec.position;
      let best = positions[0];
      for (const p of positions) {
        if (Math.abs(p - target) < Math.abs(best - target)) best = p;
      }
      kept = kept.filter((r) => r.position_m === best);
    }
  }
  if (kept.length === 0) {
    throw new SelectionError(`no rows left after filtering. ${describeGroups(rows)}`);
  }
  return kept;
}

/** Group filtered rows into one curve per (estimator, dfo_method). */
export function buildCurves(rows: SweepRow[], spec: FigureSpec): Curve[] {
  const def = FIGURE_DEFINITIONS[spec.kind];
  const logY = spec.logY ?? def.defaultLogY;

  if (def.xColumn === "snr_db") {
    const positions = distinct(rows.map((r) => r.position_m));
    if (positions.length > 1) {
      throw new SelectionError(
        `${spec.kind} plots over SNR and needs one track position; ` +
          `pass --position. ${describeGroups(rows)}`,
      );
    }
  } else {
    const snrs = distinct(rows.map((r) => r.snr_db));
    if (snrs.length > 1) {
      throw new SelectionError(
        `tp plots over position and needs one SNR; the file has ` +
          `SNRs ${snrs.join(", ")}`,
      );
    }
  }

  const groups = new Map<string, SweepRow[]>();
  for (const row of rows) {
    const key = `${row.estimator}/${row.dfo_method}`;
    const group = groups.get(key);
    if (group === undefined) {
      groups.set(key, [row]);
    } else {
      group.push(row);
    }
  }

  const curves: Curve[] = [];
  for (const key of [...groups.keys()].sort()) {
    const members = groups.get(key)!;
    members.sort((a, b) => a[def.xColumn] - b[def.xColumn]);
    const points: CurvePoint[] = [];
    for (const row of members) {
      let y = row[def.metric] as number;
      let clamped = false;
      if (Number.isNaN(y)) continue; // pilots-only cells have no BER/TP
      if (logY && def.zeroClamp !== undefined && y <= 0) {
        y = def.zeroClamp;
        clamped = true;
      }
      if (logY && y <= 0) continue; // cannot place on a log axis
      points.push({ x: row[def.xColumn] as number, y, clamped });
    }
    if (points.length > 0) {
      curves.push({ label: key, points });
    }
  }
  if (curves.length === 0) {
    throw new SelectionError(
      `no plottable data for figure ${spec.kind}. ${describeGroups(rows)}`,
    );
  }
  return curves;
}
