/** Parsers for the simulator's output files (schemas fixed upstream). */

import { readFileSync } from "node:fs";

export interface StatsRow {
  estimator: string;
  lambda?: number;
  t?: number;
  a?: number;
  b?: number;
  B?: number;
  p_hat: number;
  se: number;
  n: number;
}

export function parseStatsCsv(path: string): StatsRow[] {
  const lines = readFileSync(path, "utf8").trim().split("\n");
  if (lines.length === 0 || !lines[0].startsWith("estimator,")) {
    throw new Error(`${path}: not a stats batch CSV`);
  }
  const cols = lines[0].split(",");
  return lines.slice(1).map((line) => {
    const cells = line.split(",");
    const row: Record<string, unknown> = {};
    cols.forEach((name, i) => {
      const cell = cells[i];
      if (cell === undefined || cell === "") return;
      row[name] = name === "estimator" || name === "process" ? cell : Number(cell);
    });
    return row as unknown as StatsRow;
  });
}

export interface TimelineEvent {
  t: number;
  x: number;
  kind: "micro" | "macro";
  a?: number;
  b?: number;
}

export function parseTimelineCsv(path: string): TimelineEvent[] {
  const lines = readFileSync(path, "utf8").trim().split("\n");
  if (lines[0] !== "t,x,kind,a,b") {
    throw new Error(`${path}: not a timeline CSV`);
  }
  return lines.slice(1).map((line) => {
    const [t, x, kind, a, b] = line.split(",");
    if (kind !== "micro" && kind !== "macro") {
      throw new Error(`${path}: unknown event kind ${kind}`);
    }
    const ev: TimelineEvent = { t: Number(t), x: Number(x), kind };
    if (a !== "" && a !== undefined) ev.a = Number(a);
    if (b !== "" && b !== undefined) ev.b = Number(b);
    return ev;
  });
}

export interface Breakpoint {
  x: number;
  z: number;
  h: number;
}

export interface Cell {
  left: number;
  right: number;
  z: number;
}

export interface StateRow {
  t: number;
  breakpoints: Breakpoint[];
  cells: Cell[];
}

export function parseStateDump(path: string): StateRow[] {
  const lines = readFileSync(path, "utf8").trim().split("\n");
  return lines.map((line) => {
    const parts = line.split(";");
    if (parts.length !== 3) {
      throw new Error(`${path}: malformed dump row ${line.slice(0, 40)}`);
    }
    const [tS, bpS, cellS] = parts;
    const breakpoints = bpS
      ? bpS.split(",").map((item) => {
          const [x, z, h] = item.split(":").map(Number);
          return { x, z, h };
        })
      : [];
    const cells = cellS.split(",").map((item) => {
      const [left, right, z] = item.split(":").map(Number);
      return { left, right, z };
    });
    return { t: Number(tS), breakpoints, cells };
  });
}

export interface CoupleSummary {
  lambdas: number[];
  medians: Record<string, number>;
  boot_se: Record<string, number>;
}

export function parseCoupleSummary(path: string): CoupleSummary {
  const data = JSON.parse(readFileSync(path, "utf8")) as CoupleSummary;
  if (!Array.isArray(data.lambdas) || typeof data.medians !== "object") {
    throw new Error(`${path}: not a couple summary`);
  }
  return data;
}
