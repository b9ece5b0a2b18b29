/**
 * Reshape sweep rows back onto the 2-D grid they were written from.  Rows
 * are row-major with the later-declared axis fastest; both orientations
 * are accepted and verified value-for-value, so the reshape introduces no
 * interpolation and fails loudly on ragged or re-ordered input.
 */

import { column, SweepTable } from "./csv.js";

export interface Grid {
  /** Ordered distinct values of the x / y columns. */
  x: number[];
  y: number[];
  /** z[iy][ix], exactly the CSV cell values. */
  z: number[][];
}

function uniqueInOrder(values: number[]): number[] {
  const out: number[] = [];
  const seen = new Set<number>();
  for (const v of values) {
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}

function tiles(
  xs: number[],
  ys: number[],
  ux: number[],
  uy: number[],
  xFast: boolean
): boolean {
  const nx = ux.length;
  const ny = uy.length;
  for (let k = 0; k < xs.length; k++) {
    const ix = xFast ? k % nx : Math.floor(k / ny);
    const iy = xFast ? Math.floor(k / nx) : k % ny;
    if (xs[k] !== ux[ix] || ys[k] !== uy[iy]) return false;
  }
  return true;
}

export function reshapeGrid(
  table: SweepTable,
  xCol: string,
  yCol: string,
  zCol: string
): Grid {
  const xs = column(table, xCol);
  const ys = column(table, yCol);
  const zs = column(table, zCol);

  const ux = uniqueInOrder(xs);
  const uy = uniqueInOrder(ys);
  for (const [name, unique] of [
    [xCol, ux],
    [yCol, uy],
  ] as const) {
    const axis = table.axes.find((a) => a.name === name);
    if (axis && axis.size !== unique.length) {
      throw new Error(
        `axis metadata says ${name} has ${axis.size} values, found ${unique.length}`
      );
    }
  }
  if (xs.length !== ux.length * uy.length) {
    throw new Error(
      `ragged grid: ${xs.length} rows != ${ux.length} x ${uy.length}`
    );
  }

  const xFast = tiles(xs, ys, ux, uy, true);
  if (!xFast && !tiles(xs, ys, ux, uy, false)) {
    throw new Error(
      `rows do not tile the ${xCol}/${yCol} grid in row-major order`
    );
  }

  const nx = ux.length;
  const ny = uy.length;
  const z: number[][] = [];
  for (let iy = 0; iy < ny; iy++) {
    const row: number[] = [];
    for (let ix = 0; ix < nx; ix++) {
      row.push(zs[xFast ? iy * nx + ix : ix * ny + iy]);
    }
    z.push(row);
  }
  return { x: ux, y: uy, z };
}
