/**
 * Sweep-CSV plotting. Three kinds:
 *
 *   line       one y(x) trace in file row order
 *   multi-line one trace per distinct value of a grouping column
 *   contour    filled z(x, y) map from a row-major grid sweep
 *
 * Free choices, fixed here rather than exposed as options: viridis
 * palette quantized to 12 uniform levels (in log10 space when the z
 * axis is logarithmic), cell edges at midpoints between grid values,
 * a six-color cycle for multi-line traces. Rendering only reads its
 * inputs and writes the one output file; repeated renders of the same
 * spec are byte-identical.
 */

import { mkdirSync, writeFileSync } from "fs";
import { dirname } from "path";
import { column, readSweepCsv, SweepTable } from "./csv.js";
import { reshapeGrid } from "./grid.js";
import {
  axesSvg,
  colorAt,
  COLOR_LEVELS,
  esc,
  fmtNum,
  Frame,
  levelColor,
  makeScale,
  PALETTE,
  Scale,
} from "./svg.js";

export type PlotKind = "line" | "multi-line" | "contour";

export interface PlotSpec {
  /** sweep CSV produced by the simulation CLI */
  input: string;
  kind: PlotKind;
  /** column names; z is the grouping column (multi-line) or cell value (contour) */
  x: string;
  y: string;
  z?: string;
  logX?: boolean;
  logY?: boolean;
  logZ?: boolean;
  /** path of the SVG to write */
  output: string;
  /** optional optimal-curve sidecar CSV (j, delta_opt, u_opt) drawn dashed */
  overlay?: string;
  title?: string;
}

const KINDS: PlotKind[] = ["line", "multi-line", "contour"];
const STRING_FIELDS = ["input", "x", "y", "z", "output", "overlay", "title"];
const BOOL_FIELDS = ["logX", "logY", "logZ"];

export function validateSpec(raw: unknown): PlotSpec {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new Error("plot spec must be a JSON object");
  }
  const obj = raw as Record<string, unknown>;
  for (const key of Object.keys(obj)) {
    if (key !== "kind" && !STRING_FIELDS.includes(key) && !BOOL_FIELDS.includes(key)) {
      throw new Error(`unknown plot spec field: ${key}`);
    }
  }
  for (const key of ["input", "x", "y", "output"]) {
    const v = obj[key];
    if (typeof v !== "string" || v.length === 0) {
      throw new Error(`plot spec field "${key}" must be a non-empty string`);
    }
  }
  for (const key of STRING_FIELDS) {
    if (obj[key] !== undefined && typeof obj[key] !== "string") {
      throw new Error(`plot spec field "${key}" must be a string`);
    }
  }
  for (const key of BOOL_FIELDS) {
    if (obj[key] !== undefined && typeof obj[key] !== "boolean") {
      throw new Error(`plot spec field "${key}" must be a boolean`);
    }
  }
  const kind = obj.kind;
  if (typeof kind !== "string" || !KINDS.includes(kind as PlotKind)) {
    throw new Error(`plot spec field "kind" must be one of: ${KINDS.join(", ")}`);
  }
  if ((kind === "multi-line" || kind === "contour") && !obj.z) {
    throw new Error(`kind "${kind}" requires a z column`);
  }
  return obj as unknown as PlotSpec;
}

const FRAME: Frame = { width: 640, height: 480, left: 64, right: 24, top: 36, bottom: 48 };
const CONTOUR_FRAME: Frame = { ...FRAME, right: 96 };

interface Pt {
  x: number;
  y: number;
}

/** Split a trace into drawable runs, breaking at values a scale cannot place. */
function segments(xs: number[], ys: number[], xScale: Scale, yScale: Scale): Pt[][] {
  const ok = (v: number, s: Scale) => Number.isFinite(v) && (!s.log || v > 0);
  const runs: Pt[][] = [];
  let run: Pt[] = [];
  for (let i = 0; i < xs.length; i++) {
    if (ok(xs[i], xScale) && ok(ys[i], yScale)) {
      run.push({ x: xs[i], y: ys[i] });
    } else if (run.length) {
      runs.push(run);
      run = [];
    }
  }
  if (run.length) runs.push(run);
  return runs;
}

function traceSvg(runs: Pt[][], xScale: Scale, yScale: Scale, color: string, dashed = false): string {
  const parts: string[] = [];
  const dash = dashed ? ' stroke-dasharray="6 4"' : "";
  for (const run of runs) {
    if (run.length === 1) {
      // an isolated sample has no line to draw; mark it instead
      parts.push(
        `<circle cx="${xScale(run[0].x).toFixed(2)}" cy="${yScale(run[0].y).toFixed(2)}" r="3.5" fill="${color}"/>`
      );
    } else {
      const pts = run
        .map((p) => `${xScale(p.x).toFixed(2)},${yScale(p.y).toFixed(2)}`)
        .join(" ");
      parts.push(
        `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.6"${dash}/>`
      );
    }
  }
  return parts.join("\n");
}

function finiteDomain(values: number[], log: boolean, what: string): [number, number] {
  const usable = values.filter((v) => Number.isFinite(v) && (!log || v > 0));
  if (!usable.length) {
    throw new Error(`no plottable values in ${what}${log ? " (log scale, need positive data)" : ""}`);
  }
  return [Math.min(...usable), Math.max(...usable)];
}

/** Cell boundaries at midpoints between grid values (log-space on log axes). */
function cellEdges(vals: number[], log: boolean): number[] {
  const t = (v: number) => (log ? Math.log10(v) : v);
  const back = (v: number) => (log ? Math.pow(10, v) : v);
  const ts = vals.map(t);
  const edges: number[] = [];
  if (ts.length === 1) {
    const pad = log ? 0.15 : Math.abs(ts[0]) * 0.05 || 0.5;
    return [back(ts[0] - pad), back(ts[0] + pad)];
  }
  edges.push(back(ts[0] - (ts[1] - ts[0]) / 2));
  for (let i = 0; i + 1 < ts.length; i++) {
    edges.push(back((ts[i] + ts[i + 1]) / 2));
  }
  edges.push(back(ts[ts.length - 1] + (ts[ts.length - 1] - ts[ts.length - 2]) / 2));
  return edges;
}

function lineBody(table: SweepTable, spec: PlotSpec, xScale: Scale, yScale: Scale): string {
  return traceSvg(
    segments(column(table, spec.x), column(table, spec.y), xScale, yScale),
    xScale,
    yScale,
    PALETTE[0]
  );
}

function multiLineBody(
  table: SweepTable,
  spec: PlotSpec,
  xScale: Scale,
  yScale: Scale,
  frame: Frame
): string {
  const groupCol = spec.z as string;
  const keys = column(table, groupCol);
  const xs = column(table, spec.x);
  const ys = column(table, spec.y);
  const order: string[] = [];
  const grouped = new Map<string, { xs: number[]; ys: number[] }>();
  for (let i = 0; i < keys.length; i++) {
    const k = String(keys[i]);
    let g = grouped.get(k);
    if (!g) {
      g = { xs: [], ys: [] };
      grouped.set(k, g);
      order.push(k);
    }
    g.xs.push(xs[i]);
    g.ys.push(ys[i]);
  }
  const parts: string[] = [];
  order.forEach((k, i) => {
    const g = grouped.get(k) as { xs: number[]; ys: number[] };
    parts.push(traceSvg(segments(g.xs, g.ys, xScale, yScale), xScale, yScale, PALETTE[i % PALETTE.length]));
  });
  // legend, top right inside the plot area
  const lx = frame.width - frame.right - 150;
  order.forEach((k, i) => {
    const ly = frame.top + 16 + i * 18;
    const color = PALETTE[i % PALETTE.length];
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" stroke="${color}" stroke-width="1.6"/>`,
      `<text x="${lx + 28}" y="${ly}" font-size="11" dominant-baseline="middle" fill="#333">${esc(`${groupCol} = ${fmtNum(Number(k))}`)}</text>`
    );
  });
  return parts.join("\n");
}

interface ContourData {
  grid: { x: number[]; y: number[]; z: number[][] };
  xEdges: number[];
  yEdges: number[];
}

function contourBody(
  data: ContourData,
  spec: PlotSpec,
  xScale: Scale,
  yScale: Scale,
  frame: Frame
): string {
  const { grid, xEdges, yEdges } = data;
  const logZ = !!spec.logZ;
  const tz = (v: number) => (logZ ? Math.log10(v) : v);
  const flat = grid.z.flat().filter((v) => Number.isFinite(v) && (!logZ || v > 0));
  if (!flat.length) {
    throw new Error(`no plottable values in column ${spec.z}${logZ ? " (log scale, need positive data)" : ""}`);
  }
  let zMin = tz(Math.min(...flat));
  let zMax = tz(Math.max(...flat));
  if (zMin === zMax) {
    zMin -= 0.5;
    zMax += 0.5;
  }
  const parts: string[] = [];
  for (let iy = 0; iy < grid.y.length; iy++) {
    for (let ix = 0; ix < grid.x.length; ix++) {
      const v = grid.z[iy][ix];
      const usable = Number.isFinite(v) && (!logZ || v > 0);
      const fill = usable ? levelColor((tz(v) - zMin) / (zMax - zMin)) : "#d9d9d9";
      const x0 = xScale(xEdges[ix]);
      const x1 = xScale(xEdges[ix + 1]);
      const y0 = yScale(yEdges[iy]);
      const y1 = yScale(yEdges[iy + 1]);
      parts.push(
        `<rect x="${Math.min(x0, x1).toFixed(2)}" y="${Math.min(y0, y1).toFixed(2)}" width="${Math.abs(x1 - x0).toFixed(2)}" height="${Math.abs(y1 - y0).toFixed(2)}" fill="${fill}" class="cell"/>`
      );
    }
  }
  // colorbar in the widened right margin
  const barX = frame.width - frame.right + 24;
  const barTop = frame.top;
  const barH = frame.height - frame.top - frame.bottom;
  const step = barH / COLOR_LEVELS;
  for (let i = 0; i < COLOR_LEVELS; i++) {
    const y = barTop + barH - (i + 1) * step;
    parts.push(
      `<rect x="${barX}" y="${y.toFixed(2)}" width="14" height="${(step + 0.5).toFixed(2)}" fill="${colorAt((i + 0.5) / COLOR_LEVELS)}"/>`
    );
  }
  parts.push(
    `<rect x="${barX}" y="${barTop}" width="14" height="${barH}" fill="none" stroke="#333" stroke-width="0.8"/>`
  );
  const label = (tval: number) => (logZ ? fmtNum(Math.pow(10, tval)) : fmtNum(tval));
  parts.push(
    `<text x="${barX + 18}" y="${barTop + barH}" font-size="10" dominant-baseline="middle" fill="#333">${esc(label(zMin))}</text>`,
    `<text x="${barX + 18}" y="${barTop}" font-size="10" dominant-baseline="middle" fill="#333">${esc(label(zMax))}</text>`,
    `<text x="${barX + 7}" y="${barTop - 8}" font-size="11" text-anchor="middle" fill="#333">${esc(spec.z as string)}</text>`
  );
  return parts.join("\n");
}

const OVERLAY_X = "j";
const OVERLAY_Y = "u_opt";

function overlayBody(path: string, xScale: Scale, yScale: Scale): string {
  const table = readSweepCsv(path);
  for (const col of [OVERLAY_X, OVERLAY_Y]) {
    if (!table.columns.includes(col)) {
      throw new Error(
        `overlay ${path} lacks column ${col} (have: ${table.columns.join(", ")}); expected an optimal-curve sidecar CSV`
      );
    }
  }
  // nan rows mark couplings with no optimum; they break the curve
  const body = traceSvg(
    segments(column(table, OVERLAY_X), column(table, OVERLAY_Y), xScale, yScale),
    xScale,
    yScale,
    "#ffffff",
    true
  );
  return `<g clip-path="url(#plotclip)">\n${body}\n</g>`;
}

export function render(spec: PlotSpec): string {
  const table = readSweepCsv(spec.input);
  for (const name of [spec.x, spec.y, spec.z]) {
    if (name !== undefined) column(table, name); // throws on a missing column
  }
  const frame = spec.kind === "contour" ? CONTOUR_FRAME : FRAME;
  const logX = !!spec.logX;
  const logY = !!spec.logY;

  // contour axes span the outer cell edges, not just the sample points,
  // so the border cells render at full size
  let contour: ContourData | undefined;
  let xDomain = finiteDomain(column(table, spec.x), logX, `column ${spec.x}`);
  let yDomain = finiteDomain(column(table, spec.y), logY, `column ${spec.y}`);
  if (spec.kind === "contour") {
    const grid = reshapeGrid(table, spec.x, spec.y, spec.z as string);
    const xEdges = cellEdges(grid.x, logX);
    const yEdges = cellEdges(grid.y, logY);
    contour = { grid, xEdges, yEdges };
    xDomain = [Math.min(...xEdges), Math.max(...xEdges)];
    yDomain = [Math.min(...yEdges), Math.max(...yEdges)];
  }
  const xScale = makeScale(xDomain, [frame.left, frame.width - frame.right], logX);
  const yScale = makeScale(yDomain, [frame.height - frame.bottom, frame.top], logY);

  let body: string;
  if (spec.kind === "line") {
    body = lineBody(table, spec, xScale, yScale);
  } else if (spec.kind === "multi-line") {
    body = multiLineBody(table, spec, xScale, yScale, frame);
  } else {
    body = contourBody(contour as ContourData, spec, xScale, yScale, frame);
  }
  if (spec.overlay) {
    body += "\n" + overlayBody(spec.overlay, xScale, yScale);
  }

  const clip = `<clipPath id="plotclip"><rect x="${frame.left}" y="${frame.top}" width="${frame.width - frame.left - frame.right}" height="${frame.height - frame.top - frame.bottom}"/></clipPath>`;
  const edge = `<rect x="${frame.left}" y="${frame.top}" width="${frame.width - frame.left - frame.right}" height="${frame.height - frame.top - frame.bottom}" fill="none" stroke="#333" stroke-width="1"/>`;
  const svg = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${frame.width}" height="${frame.height}" viewBox="0 0 ${frame.width} ${frame.height}" font-family="sans-serif">`,
    `<defs>${clip}</defs>`,
    axesSvg(frame, xScale, yScale, spec.x, spec.y, spec.title ?? ""),
    body,
    edge,
    `</svg>`,
    ``,
  ].join("\n");

  mkdirSync(dirname(spec.output), { recursive: true });
  writeFileSync(spec.output, svg);
  return svg;
}
