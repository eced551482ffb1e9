/**
 * CSV loading and schema validation for the two renderable kinds.
 */

import Papa from "papaparse";

export type Row = Record<string, string>;

export class SchemaError extends Error {}

export const THETA_COLUMNS = [
  "theta_rad",
  "scheme",
  "snr_a_db",
  "snr_b_db",
  "sir_bits",
  "std_err",
] as const;

export const ACPR_COLUMNS = [
  "snr_a_db",
  "snr_b_db",
  "scheme",
  "decoder",
  "rate",
  "decodable",
  "status",
] as const;

/** Parse CSV text and check that every required column is present. */
export function parseCsv(text: string, required: readonly string[]): Row[] {
  const parsed = Papa.parse<Row>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`CSV parse error: ${parsed.errors[0].message}`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const col of required) {
    if (!fields.includes(col)) {
      throw new SchemaError(`missing column: ${col}`);
    }
  }
  if (parsed.data.length === 0) {
    throw new SchemaError("CSV contains no data rows");
  }
  return parsed.data;
}

export function num(row: Row, col: string): number {
  const v = Number(row[col]);
  if (!Number.isFinite(v)) {
    throw new SchemaError(`non-numeric value in column ${col}: ${row[col]}`);
  }
  return v;
}
