#!/usr/bin/env node
/** locent-plot: batch renderer for experiment record CSVs.
 *
 *   locent-plot --in records.csv --x mlocal:3 --y kl --group cell --out fig.svg
 */

import { writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { readRecordsCsv, requireColumn, selectXY } from "./csv.js";
import { MissingColumn, TooFewPoints } from "./errors.js";
import { renderSvg, type Series } from "./plot.js";

interface Args {
  input: string;
  x: string;
  y: string;
  group?: string;
  out: string;
  title?: string;
}

const USAGE =
  "usage: locent-plot --in records.csv --x <col|mlocal:M> --y <col> [--group <col>] --out fig.svg [--title <text>]";

export function parseArgs(argv: string[]): Args {
  const opts: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      throw new Error(USAGE);
    }
    opts[flag.slice(2)] = value;
  }
  for (const required of ["in", "x", "y", "out"]) {
    if (!(required in opts)) {
      throw new Error(USAGE);
    }
  }
  return {
    input: opts["in"],
    x: opts["x"],
    y: opts["y"],
    group: opts["group"],
    out: opts["out"],
    title: opts["title"],
  };
}

export function buildSeries(args: Args): Series[] {
  const table = readRecordsCsv(args.input);
  const { rows, xColumn } = selectXY(table, args.x, args.y);
  if (args.group !== undefined) {
    requireColumn(table, args.group);
  }
  const groups = new Map<string, Series>();
  for (const row of rows) {
    const name = args.group === undefined ? "all" : row[args.group];
    let s = groups.get(name);
    if (s === undefined) {
      s = { name, xs: [], ys: [] };
      groups.set(name, s);
    }
    s.xs.push(Number(row[xColumn]));
    s.ys.push(Number(row[args.y]));
  }
  return [...groups.values()];
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    return 1;
  }
  try {
    const series = buildSeries(args);
    if (series.length === 0) {
      throw new TooFewPoints("all", 0);
    }
    const svg = renderSvg(series, {
      xLabel: args.x,
      yLabel: args.y,
      title: args.title,
    });
    writeFileSync(args.out, svg + "\n");
    return 0;
  } catch (err) {
    if (err instanceof MissingColumn || err instanceof TooFewPoints) {
      process.stderr.write(`error: ${err.message}\n`);
      return 2;
    }
    throw err;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
