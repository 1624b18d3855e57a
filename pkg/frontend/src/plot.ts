/** SVG scatter-plus-fit renderer. Pure string templating: figures are batch
 * artifacts, so there is no DOM and no interactivity. */

import { fitLine, type Fit } from "./stats.js";

export interface Series {
  name: string;
  xs: number[];
  ys: number[];
}

export interface PlotOptions {
  width?: number;
  height?: number;
  xLabel?: string;
  yLabel?: string;
  title?: string;
}

interface Scale {
  lo: number;
  hi: number;
  toPx: (v: number) => number;
}

const MARKERS = ["circle", "square", "diamond", "triangle", "cross"] as const;
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

const MARGIN = { top: 40, right: 20, bottom: 48, left: 64 };

function makeScale(values: number[], pxLo: number, pxHi: number): Scale {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const toPx = (v: number) => pxLo + ((v - lo) / (hi - lo)) * (pxHi - pxLo);
  return { lo, hi, toPx };
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function marker(kind: string, cx: number, cy: number, color: string): string {
  const r = 3.5;
  switch (kind) {
    case "square":
      return `<rect x="${cx - r}" y="${cy - r}" width="${2 * r}" height="${2 * r}" fill="${color}" fill-opacity="0.7"/>`;
    case "diamond":
      return `<path d="M${cx},${cy - r * 1.3} L${cx + r * 1.3},${cy} L${cx},${cy + r * 1.3} L${cx - r * 1.3},${cy} Z" fill="${color}" fill-opacity="0.7"/>`;
    case "triangle":
      return `<path d="M${cx},${cy - r * 1.3} L${cx + r * 1.2},${cy + r} L${cx - r * 1.2},${cy + r} Z" fill="${color}" fill-opacity="0.7"/>`;
    case "cross":
      return `<path d="M${cx - r},${cy - r} L${cx + r},${cy + r} M${cx - r},${cy + r} L${cx + r},${cy - r}" stroke="${color}" stroke-width="1.5"/>`;
    default:
      return `<circle cx="${cx}" cy="${cy}" r="${r}" fill="${color}" fill-opacity="0.7"/>`;
  }
}

function axisTicks(scale: Scale, count = 5): number[] {
  const ticks: number[] = [];
  for (let i = 0; i <= count; i++) {
    ticks.push(scale.lo + (i / count) * (scale.hi - scale.lo));
  }
  return ticks;
}

function fmtTick(v: number): string {
  const a = Math.abs(v);
  if (a !== 0 && (a < 1e-3 || a >= 1e4)) return v.toExponential(2);
  return v.toPrecision(4).replace(/\.?0+$/, "");
}

/** R^2 annotation text, three decimals, matching the convention
 * "annotation R^2 = 1.000" for a perfect line. */
export function rSquaredLabel(fit: Fit): string {
  return `R² = ${fit.rSquared.toFixed(3)}`;
}

export function renderSvg(series: Series[], opts: PlotOptions = {}): string {
  const width = opts.width ?? 640;
  const height = opts.height ?? 480;
  const allX = series.flatMap((s) => s.xs);
  const allY = series.flatMap((s) => s.ys);
  const xScale = makeScale(allX, MARGIN.left, width - MARGIN.right);
  const yScale = makeScale(allY, height - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  // axes
  const x0 = MARGIN.left;
  const x1 = width - MARGIN.right;
  const y0 = height - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`);
  for (const t of axisTicks(xScale)) {
    const px = xScale.toPx(t);
    parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="black"/>`);
    parts.push(`<text x="${px}" y="${y0 + 18}" text-anchor="middle">${fmtTick(t)}</text>`);
  }
  for (const t of axisTicks(yScale)) {
    const py = yScale.toPx(t);
    parts.push(`<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="black"/>`);
    parts.push(`<text x="${x0 - 8}" y="${py + 4}" text-anchor="end">${fmtTick(t)}</text>`);
  }
  if (opts.xLabel) {
    parts.push(
      `<text x="${(x0 + x1) / 2}" y="${height - 10}" text-anchor="middle">${esc(opts.xLabel)}</text>`,
    );
  }
  if (opts.yLabel) {
    const cy = (y0 + y1) / 2;
    parts.push(
      `<text x="16" y="${cy}" text-anchor="middle" transform="rotate(-90 16 ${cy})">${esc(opts.yLabel)}</text>`,
    );
  }
  if (opts.title) {
    parts.push(
      `<text x="${(x0 + x1) / 2}" y="22" text-anchor="middle" font-size="14">${esc(opts.title)}</text>`,
    );
  }

  // one fit (dashed) and one legend row per group
  series.forEach((s, gi) => {
    const color = COLORS[gi % COLORS.length];
    const mk = MARKERS[gi % MARKERS.length];
    const fit = fitLine(s.xs, s.ys, s.name);

    const fx0 = xScale.lo + 0.02 * (xScale.hi - xScale.lo);
    const fx1 = xScale.hi - 0.02 * (xScale.hi - xScale.lo);
    parts.push(
      `<line x1="${xScale.toPx(fx0)}" y1="${yScale.toPx(fit.slope * fx0 + fit.intercept)}" ` +
        `x2="${xScale.toPx(fx1)}" y2="${yScale.toPx(fit.slope * fx1 + fit.intercept)}" ` +
        `stroke="${color}" stroke-dasharray="6 4"/>`,
    );
    for (let i = 0; i < s.xs.length; i++) {
      parts.push(marker(mk, xScale.toPx(s.xs[i]), yScale.toPx(s.ys[i]), color));
    }

    const ly = y1 + 14 + gi * 16;
    parts.push(marker(mk, x1 - 170, ly - 4, color));
    parts.push(
      `<text x="${x1 - 160}" y="${ly}" fill="${color}">${esc(s.name)}: ${rSquaredLabel(fit)}, r = ${fit.r.toFixed(4)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}
