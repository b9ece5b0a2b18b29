/**
 * Reader for the sweep CSV schema: `#` comment lines (version, timestamp,
 * config echo, axis shapes), one header row, numeric data rows with `nan`
 * for unavailable values.  Files produced by separate runs over the same
 * header can be concatenated; interior comment lines and repeated header
 * rows are skipped.
 */

import { readFileSync } from "fs";
import Papa from "papaparse";

export interface AxisInfo {
  name: string;
  size: number;
}

export interface SweepTable {
  columns: string[];
  rows: Record<string, number>[];
  /** Comment lines, `#` stripped. */
  comments: string[];
  /** Axis shapes parsed from `# axis: <name> <count>` comments. */
  axes: AxisInfo[];
}

const AXIS_COMMENT = /^axis:\s+(\S+)\s+(\d+)$/;

function toNumber(raw: string, column: string): number {
  const s = raw.trim();
  if (s === "nan") return NaN;
  if (s === "") throw new Error(`empty value in column ${column}`);
  const v = Number(s);
  if (Number.isNaN(v)) {
    throw new Error(`malformed value "${s}" in column ${column}`);
  }
  return v;
}

export function parseSweepCsv(text: string): SweepTable {
  const comments: string[] = [];
  for (const line of text.split("\n")) {
    if (line.startsWith("#")) {
      comments.push(line.replace(/^#\s?/, ""));
    }
  }
  const axes: AxisInfo[] = [];
  for (const c of comments) {
    const m = AXIS_COMMENT.exec(c.trim());
    if (m) axes.push({ name: m[1], size: parseInt(m[2], 10) });
  }

  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    comments: "#",
    delimiter: ",",
    skipEmptyLines: true,
  });
  const fatal = parsed.errors.find((e) => e.type !== "FieldMismatch");
  if (fatal) throw new Error(`CSV parse error: ${fatal.message}`);
  const columns = (parsed.meta.fields ?? []).map((f) => f.trim()).filter((f) => f !== "");
  if (columns.length === 0) throw new Error("CSV has no header row");

  const rows: Record<string, number>[] = [];
  for (const raw of parsed.data) {
    // A concatenated file repeats its header; skip exact repetitions.
    if (columns.every((c) => (raw[c] ?? "").trim() === c)) continue;
    const row: Record<string, number> = {};
    for (const c of columns) {
      const v = raw[c];
      if (v === undefined) throw new Error(`short row: missing column ${c}`);
      row[c] = toNumber(v, c);
    }
    rows.push(row);
  }
  if (rows.length === 0) throw new Error("CSV has no data rows");
  return { columns, rows, comments, axes };
}

export function readSweepCsv(path: string): SweepTable {
  return parseSweepCsv(readFileSync(path, "utf-8"));
}

/** Values of one column; the column must exist in the header. */
export function column(table: SweepTable, name: string): number[] {
  if (!table.columns.includes(name)) {
    throw new Error(
      `column ${name} not in header (have: ${table.columns.join(", ")})`
    );
  }
  return table.rows.map((r) => r[name]);
}
