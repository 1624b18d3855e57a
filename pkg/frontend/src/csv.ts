/** Record-CSV reader: leading "#" comment lines, then a header row, then
 * comma-separated values. The CSV written by `locent exp grid` is the only
 * contract between the experiment pipeline and this renderer. */

import { readFileSync } from "node:fs";
import { MissingColumn } from "./errors.js";

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export function parseRecordsCsv(text: string): Table {
  const lines = text.split("\n").filter((l) => l.length > 0 && !l.startsWith("#"));
  if (lines.length === 0) {
    return { columns: [], rows: [] };
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line) => {
    const cells = line.split(",");
    const row: Record<string, string> = {};
    columns.forEach((c, i) => {
      row[c] = cells[i] ?? "";
    });
    return row;
  });
  return { columns, rows };
}

export function readRecordsCsv(path: string): Table {
  return parseRecordsCsv(readFileSync(path, "utf-8"));
}

export function requireColumn(table: Table, column: string): void {
  if (!table.columns.includes(column)) {
    throw new MissingColumn(column, table.columns);
  }
}

/** Resolve an x selector: either a plain column name, or "mlocal:M" which
 * filters to rows with m = M and reads the exact_mlocal column (the same
 * convention as `locent exp stats`). */
export function selectXY(
  table: Table,
  xSpec: string,
  yColumn: string,
): { rows: Record<string, string>[]; xColumn: string } {
  let rows = table.rows;
  let xColumn = xSpec;
  if (xSpec.startsWith("mlocal:")) {
    const m = xSpec.slice("mlocal:".length);
    requireColumn(table, "m");
    xColumn = "exact_mlocal";
    rows = rows.filter((r) => r["m"] === m);
  }
  requireColumn(table, xColumn);
  requireColumn(table, yColumn);
  return { rows, xColumn };
}
