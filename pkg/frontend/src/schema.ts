/**
 * The sweep CSV contract produced by the simulation harness.
 *
 * One header row, one data row per (snr, position, estimator) cell.  The
 * column set is a versioned contract: a CSV whose header does not match
 * exactly is rejected before any rendering happens.
 */

export const CSV_COLUMNS = [
  "snr_db",
  "position_m",
  "estimator",
  "dfo_method",
  "dfo_rel_err_mean",
  "dfo_rel_err_p95",
  "mse_db",
  "ber",
  "tp_bits_per_symbol",
  "mult_count",
  "drops_used",
  "ci95_mse_db",
] as const;

export type ColumnName = (typeof CSV_COLUMNS)[number];

export interface SweepRow {
  snr_db: number;
  position_m: number;
  estimator: string;
  dfo_method: string;
  dfo_rel_err_mean: number;
  dfo_rel_err_p95: number;
  mse_db: number;
  ber: number;
  tp_bits_per_symbol: number;
  mult_count: number;
  drops_used: number;
  ci95_mse_db: number;
}

export class SchemaError extends Error {}

const NUMERIC_COLUMNS: ColumnName[] = CSV_COLUMNS.filter(
  (c) => c !== "estimator" && c !== "dfo_method",
);

export function validateHeader(headerFields: string[]): void {
  const expected = CSV_COLUMNS.join(",");
  const got = headerFields.join(",");
  if (got !== expected) {
    throw new SchemaError(
      `CSV header does not match the sweep schema.\n  expected: ${expected}\n  got:      ${got}`,
    );
  }
}

export function rowFromFields(fields: string[], line: number): SweepRow {
  if (fields.length !== CSV_COLUMNS.length) {
    throw new SchemaError(
      `line ${line}: expected ${CSV_COLUMNS.length} fields, got ${fields.length}`,
    );
  }
  const raw: Record<string, string | number> = {};
  CSV_COLUMNS.forEach((name, i) => {
    raw[name] = fields[i];
  });
  for (const name of NUMERIC_COLUMNS) {
    const value = Number(raw[name]);
    if (Number.isNaN(value) && raw[name] !== "nan") {
      throw new SchemaError(`line ${line}: column ${name} is not numeric: ${raw[name]}`);
    }
    raw[name] = value;
  }
  return raw as unknown as SweepRow;
}
