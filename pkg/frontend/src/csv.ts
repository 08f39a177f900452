/** Parsing of harness sweep CSVs (plain comma-separated, no quoting). */

import { rowFromFields, SchemaError, SweepRow, validateHeader } from "./schema.js";

export function parseCsv(text: string): SweepRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV");
  }
  validateHeader(lines[0].split(","));
  return lines.slice(1).map((line, i) => rowFromFields(line.split(","), i + 2));
}
