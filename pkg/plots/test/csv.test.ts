import { describe, expect, it } from "vitest";
import { dirname, join } from "path";
import { fileURLToPath } from "url";
import { column, parseSweepCsv, readSweepCsv } from "../src/csv.js";

const FIX = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

describe("parseSweepCsv", () => {
  it("reads columns, comments, and axis sizes from a sweep file", () => {
    const table = readSweepCsv(join(FIX, "map_small.csv"));
    expect(table.columns).toEqual([
      "delta", "u", "j", "zeta", "phi", "nth",
      "g2_b", "n_b1", "n_b2", "g2_a", "n_a", "tau", "error_code",
    ]);
    expect(table.comments[0]).toMatch(/^phonoblock .* sweep$/);
    expect(table.axes).toEqual([
      { name: "j", size: 7 },
      { name: "u", size: 9 },
    ]);
    expect(table.rows).toHaveLength(63);
    expect(table.rows[0].delta).toBe(0.15);
  });

  it("turns nan fields into NaN numbers", () => {
    const table = readSweepCsv(join(FIX, "optima_small.csv"));
    expect(table.columns).toEqual(["j", "delta_opt", "u_opt"]);
    expect(table.rows[0].j).toBe(0.6);
    expect(Number.isNaN(table.rows[0].u_opt)).toBe(true);
    expect(Number.isNaN(table.rows[2].u_opt)).toBe(false);
  });

  it("skips repeated header lines from concatenated sweeps", () => {
    const table = readSweepCsv(join(FIX, "dips_concat.csv"));
    expect(table.rows).toHaveLength(78);
    const js = new Set(table.rows.map((r) => r.j));
    expect(js).toEqual(new Set([0.8, 0.95, 1.5]));
  });

  it("rejects malformed numeric fields with the column named", () => {
    expect(() => parseSweepCsv("a,b\n1,oops\n")).toThrow(/malformed value "oops" in column b/);
  });

  it("rejects empty fields", () => {
    expect(() => parseSweepCsv("a,b\n1,\n")).toThrow(/empty value in column b/);
  });

  it("rejects short rows with the missing column named", () => {
    expect(() => parseSweepCsv("a,b\n1\n")).toThrow(/short row: missing column b/);
  });

  it("rejects headerless and rowless input", () => {
    expect(() => parseSweepCsv("")).toThrow(/no header row/);
    expect(() => parseSweepCsv("# only a comment\n")).toThrow(/no header row/);
    expect(() => parseSweepCsv("a,b\n")).toThrow(/no data rows/);
  });
});

describe("column", () => {
  it("lists the available columns when one is missing", () => {
    const table = parseSweepCsv("a,b\n1,2\n");
    expect(() => column(table, "c")).toThrow(/column c not in header \(have: a, b\)/);
    expect(column(table, "b")).toEqual([2]);
  });
});
