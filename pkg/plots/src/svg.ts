/**
 * Minimal deterministic SVG assembly: linear and log scales, tick
 * generation, an axes frame, and the color scale used by contour fills.
 * Free visual choices (palette, level count, layout) are fixed here so
 * repeated renders are byte-identical.
 */

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function fmtNum(v: number): string {
  if (!Number.isFinite(v)) return "nan";
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e5 || a < 1e-4) {
    return v
      .toExponential(2)
      .replace(/\.?0+e/, "e")
      .replace("e+", "e");
  }
  return String(parseFloat(v.toPrecision(6)));
}

export function niceTicks(min: number, max: number, count = 6): number[] {
  const range = max - min || Math.abs(max) || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((n) => n >= rough) ?? rough;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    // clean float noise like 0.30000000000000004
    ticks.push(parseFloat(v.toPrecision(12)));
  }
  return ticks;
}

/** Decade ticks, with 2 and 5 mantissas when few decades are spanned. */
export function logTicks(min: number, max: number): number[] {
  const lo = Math.floor(Math.log10(min));
  const hi = Math.ceil(Math.log10(max));
  const mantissas = hi - lo <= 4 ? [1, 2, 5] : [1];
  const ticks: number[] = [];
  for (let d = lo; d <= hi; d++) {
    for (const m of mantissas) {
      const v = m * Math.pow(10, d);
      if (v >= min * (1 - 1e-12) && v <= max * (1 + 1e-12)) ticks.push(v);
    }
  }
  return ticks;
}

export interface Scale {
  (v: number): number;
  ticks: number[];
  min: number;
  max: number;
  log: boolean;
}

export function makeScale(
  domain: [number, number],
  range: [number, number],
  log: boolean
): Scale {
  let [lo, hi] = domain;
  if (log && (lo <= 0 || hi <= 0)) {
    throw new Error("log scale requires a positive domain");
  }
  if (lo === hi) {
    // degenerate single-value domain: pad so the point sits mid-plot
    const pad = log ? 2 : Math.abs(lo) || 1;
    lo = log ? lo / pad : lo - pad / 2;
    hi = log ? hi * pad : hi + pad / 2;
  }
  const t = (v: number) => (log ? Math.log10(v) : v);
  const f = (v: number) =>
    range[0] + ((t(v) - t(lo)) / (t(hi) - t(lo))) * (range[1] - range[0]);
  const scale = f as Scale;
  scale.ticks = log ? logTicks(lo, hi) : niceTicks(lo, hi);
  scale.min = lo;
  scale.max = hi;
  scale.log = log;
  return scale;
}

export interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export function axesSvg(
  frame: Frame,
  xs: Scale,
  ys: Scale,
  xLabel: string,
  yLabel: string,
  title: string
): string {
  const { width, height, left, right, top, bottom } = frame;
  const parts: string[] = [];
  parts.push(
    `<rect x="0" y="0" width="${width}" height="${height}" fill="#ffffff"/>`
  );
  for (const v of xs.ticks) {
    const x = xs(v).toFixed(2);
    parts.push(
      `<line x1="${x}" y1="${top}" x2="${x}" y2="${height - bottom}" stroke="#e0e0e0" stroke-width="0.6"/>`,
      `<text x="${x}" y="${height - bottom + 16}" font-size="11" text-anchor="middle" fill="#333">${esc(fmtNum(v))}</text>`
    );
  }
  for (const v of ys.ticks) {
    const y = ys(v).toFixed(2);
    parts.push(
      `<line x1="${left}" y1="${y}" x2="${width - right}" y2="${y}" stroke="#e0e0e0" stroke-width="0.6"/>`,
      `<text x="${left - 6}" y="${y}" font-size="11" text-anchor="end" dominant-baseline="middle" fill="#333">${esc(fmtNum(v))}</text>`
    );
  }
  parts.push(
    `<rect x="${left}" y="${top}" width="${width - left - right}" height="${height - top - bottom}" fill="none" stroke="#333" stroke-width="1"/>`,
    `<text x="${(left + width - right) / 2}" y="${height - 10}" font-size="13" text-anchor="middle" fill="#111">${esc(xLabel)}</text>`,
    `<text x="16" y="${(top + height - bottom) / 2}" font-size="13" text-anchor="middle" fill="#111" transform="rotate(-90 16 ${(top + height - bottom) / 2})">${esc(yLabel)}</text>`
  );
  if (title) {
    parts.push(
      `<text x="${(left + width - right) / 2}" y="${top - 8}" font-size="14" text-anchor="middle" fill="#111">${esc(title)}</text>`
    );
  }
  return parts.join("\n");
}

// Sampled viridis control points; cell colors interpolate between them.
const VIRIDIS: [number, number, number][] = [
  [68, 1, 84],
  [71, 44, 122],
  [59, 81, 139],
  [44, 113, 142],
  [33, 144, 141],
  [39, 173, 129],
  [92, 200, 99],
  [170, 220, 50],
  [253, 231, 37],
];

export function colorAt(t: number): string {
  const x = Math.min(1, Math.max(0, t)) * (VIRIDIS.length - 1);
  const i = Math.min(VIRIDIS.length - 2, Math.floor(x));
  const f = x - i;
  const c = VIRIDIS[i].map((a, k) => Math.round(a + f * (VIRIDIS[i + 1][k] - a)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

/** Quantized color levels over [0, 1]; shared by cells and the colorbar. */
export const COLOR_LEVELS = 12;

export function levelColor(t: number): string {
  const q = Math.min(COLOR_LEVELS - 1, Math.floor(t * COLOR_LEVELS));
  return colorAt((q + 0.5) / COLOR_LEVELS);
}

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
];
