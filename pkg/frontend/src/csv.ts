/**
 * Readers for the two CSV formats the optimization harness writes:
 * per-iteration traces (header `iter,objective_error,...`) and per-trial
 * CDF tables (header `trial,seed,converged,iterations,tc`).
 */

import * as fs from "fs";

export interface Table {
  columns: string[];
  rows: string[][];
}

export class SchemaError extends Error {}

export function parseCsv(path: string): Table {
  const text = fs.readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${path}: empty file`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new SchemaError(
        `${path}: row ${i + 2} has ${cells.length} cells, expected ${columns.length}`,
      );
    }
    return cells.map((c) => c.trim());
  });
  return { columns, rows };
}

/** Numeric column accessor; empty cells become NaN (optional columns). */
export function column(table: Table, name: string, path: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`${path}: missing column '${name}'`);
  }
  return table.rows.map((r) => (r[idx] === "" ? NaN : Number(r[idx])));
}

export function booleanColumn(table: Table, name: string, path: string): boolean[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`${path}: missing column '${name}'`);
  }
  return table.rows.map((r) => r[idx].toLowerCase() === "true");
}
