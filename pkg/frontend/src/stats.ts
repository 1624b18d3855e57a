/** Pearson correlation and ordinary-least-squares fit, written to match the
 * experiment pipeline's formulas term for term so annotated values agree
 * with `locent exp stats` to 1e-9. */

import { TooFewPoints } from "./errors.js";

export interface Fit {
  slope: number;
  intercept: number;
  r: number;
  rSquared: number;
  n: number;
}

function mean(xs: number[]): number {
  let s = 0;
  for (const x of xs) s += x;
  return s / xs.length;
}

export function fitLine(xs: number[], ys: number[], group = "all"): Fit {
  if (xs.length < 3 || xs.length !== ys.length) {
    throw new TooFewPoints(group, xs.length);
  }
  const mx = mean(xs);
  const my = mean(ys);
  let sxx = 0;
  let syy = 0;
  let sxy = 0;
  for (let i = 0; i < xs.length; i++) {
    const dx = xs[i] - mx;
    const dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx === 0 || syy === 0) {
    throw new TooFewPoints(group, xs.length);
  }
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  let ssResid = 0;
  for (let i = 0; i < xs.length; i++) {
    const resid = ys[i] - (slope * xs[i] + intercept);
    ssResid += resid * resid;
  }
  return {
    slope,
    intercept,
    r: sxy / Math.sqrt(sxx * syy),
    rSquared: 1 - ssResid / syy,
    n: xs.length,
  };
}
