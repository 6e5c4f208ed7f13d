#!/usr/bin/env node
/**
 * plots <kind> --in FILE [--in FILE ...] --out PNG [--width N] [--height N]
 *
 * Kinds: cluster_size_loglog | space_time_diagram | delta_T_vs_lambda | tail_vs_B
 * Pure consumer: renders simulator outputs, never recomputes statistics.
 */

import { writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";

import { FIGURES } from "./figures.js";

function parseArgs(argv: string[]) {
  const [kind, ...rest] = argv;
  const inputs: string[] = [];
  let out = "";
  let width: number | undefined;
  let height: number | undefined;
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (value === undefined) throw new Error(`missing value for ${flag}`);
    if (flag === "--in") inputs.push(value);
    else if (flag === "--out") out = value;
    else if (flag === "--width") width = Number(value);
    else if (flag === "--height") height = Number(value);
    else throw new Error(`unknown flag ${flag}`);
  }
  if (!kind || !(kind in FIGURES)) {
    throw new Error(
      `usage: plots <${Object.keys(FIGURES).join("|")}> --in FILE [--in FILE] --out PNG`,
    );
  }
  if (inputs.length === 0 || !out) throw new Error("--in and --out are required");
  return { kind, inputs, out, width, height };
}

export function main(argv: string[]): number {
  try {
    const { kind, inputs, out, width, height } = parseArgs(argv);
    const opts: { width?: number; height?: number } = {};
    if (width !== undefined) opts.width = width;
    if (height !== undefined) opts.height = height;
    const png = FIGURES[kind](inputs, opts);
    writeFileSync(out, png);
    console.error(`wrote ${out} (${png.length} bytes)`);
    return 0;
  } catch (err) {
    console.error(`plots: ${(err as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exitCode = main(process.argv.slice(2));
}
