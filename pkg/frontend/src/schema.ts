/**
 * Strict reader for the experiment runner's per-round CSV files.
 *
 * The run schema is a fixed seven-column header; anything else is a
 * schema mismatch and the resulting error names the offending column
 * (or row) and the file it came from. Values are decimal literals with
 * `nan` allowed as the only non-finite token, matching how the runner
 * serializes missing metrics such as regret on nonconvex models.
 */

import Papa from "papaparse";

export const CSV_COLUMNS = [
  "seed",
  "t",
  "loss",
  "cum_regret",
  "est_error",
  "fw_gap",
  "wall_time_ns",
] as const;

export type CsvColumn = (typeof CSV_COLUMNS)[number];

export interface RunRow {
  seed: number;
  t: number;
  loss: number;
  cum_regret: number;
  est_error: number;
  fw_gap: number;
  wall_time_ns: number;
}

export class SchemaError extends Error {
  readonly file: string;
  readonly column: string | null;

  constructor(message: string, file: string, column: string | null = null) {
    super(message);
    this.name = "SchemaError";
    this.file = file;
    this.column = column;
  }
}

const INTEGER_COLUMNS: ReadonlySet<string> = new Set([
  "seed",
  "t",
  "wall_time_ns",
]);

function parseCell(raw: unknown, column: CsvColumn, rowIndex: number,
                   file: string): number {
  if (typeof raw !== "string" || raw.trim() === "") {
    throw new SchemaError(
      `row ${rowIndex}: empty value in column "${column}" of ${file}`,
      file, column,
    );
  }
  const text = raw.trim();
  if (text.toLowerCase() === "nan") return NaN;
  const value = Number(text);
  if (!Number.isFinite(value)) {
    throw new SchemaError(
      `row ${rowIndex}: non-numeric value "${text}" in column "${column}" of ${file}`,
      file, column,
    );
  }
  if (INTEGER_COLUMNS.has(column) && !Number.isInteger(value)) {
    throw new SchemaError(
      `row ${rowIndex}: column "${column}" must be an integer, got "${text}" in ${file}`,
      file, column,
    );
  }
  return value;
}

/** Parse one CSV document; any deviation from the run schema throws. */
export function parseRunCsv(text: string, file: string): RunRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    if (first.type === "FieldMismatch") {
      const rowIndex = (first.row ?? 0) + 1;
      const shape = first.code === "TooManyFields" ? "more" : "fewer";
      throw new SchemaError(
        `row ${rowIndex}: ${shape} values than header columns in ${file}`,
        file,
      );
    }
    throw new SchemaError(
      `${file} is not parseable CSV: ${first.message}`, file,
    );
  }
  const header = parsed.meta.fields ?? [];
  for (const column of CSV_COLUMNS) {
    if (!header.includes(column)) {
      throw new SchemaError(
        `missing column "${column}" in ${file}`, file, column,
      );
    }
  }
  for (const column of header) {
    if (!(CSV_COLUMNS as readonly string[]).includes(column)) {
      throw new SchemaError(
        `unexpected column "${column}" in ${file}`, file, column,
      );
    }
  }

  const rows: RunRow[] = [];
  parsed.data.forEach((record, i) => {
    const row = {} as Record<CsvColumn, number>;
    for (const column of CSV_COLUMNS) {
      row[column] = parseCell(record[column], column, i + 1, file);
    }
    if (!Number.isFinite(row.seed) || !Number.isFinite(row.t)) {
      throw new SchemaError(
        `row ${i + 1}: seed and t must be finite in ${file}`, file,
      );
    }
    if (row.t < 1) {
      throw new SchemaError(
        `row ${i + 1}: round index t must be >= 1, got ${row.t} in ${file}`,
        file, "t",
      );
    }
    rows.push(row as unknown as RunRow);
  });
  if (rows.length === 0) {
    throw new SchemaError(`${file} contains no data rows`, file);
  }
  return rows;
}
