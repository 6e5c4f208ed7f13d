/**
 * Figure geometry, separated from rasterization so tests can assert exact
 * positions (the critical-size marker, barrier segment endpoints) without
 * decoding pixels.
 */

import {
  CoupleSummary,
  StateRow,
  StatsRow,
  TimelineEvent,
} from "./data.js";

/** Sites per unit of rescaled length: the kink location of the size law. */
export function criticalSize(lambda: number): number {
  return Math.floor(1.0 / (lambda * Math.log(1.0 / lambda)));
}

export interface SizeCurvePoint {
  logSize: number;
  logProb: number;
}

export interface SizeLawScene {
  curves: Map<number, SizeCurvePoint[]>; // lambda -> log-log curve
  markers: Map<number, number>; // lambda -> critical size (sites)
}

export function sizeLawScene(rows: StatsRow[]): SizeLawScene {
  const windows = rows.filter(
    (r) => r.estimator === "window" && r.lambda !== undefined && r.p_hat > 0,
  );
  if (windows.length === 0) {
    throw new Error("no window estimator rows with positive mass in the input");
  }
  const curves = new Map<number, SizeCurvePoint[]>();
  const markers = new Map<number, number>();
  for (const row of windows) {
    const lam = row.lambda!;
    const lo = Math.pow(lam, -row.a!);
    const hi = Math.pow(lam, -row.b!);
    // per-size mass: window probability spread over the integer sizes inside
    const point: SizeCurvePoint = {
      logSize: Math.log(Math.sqrt(lo * hi)),
      logProb: Math.log(row.p_hat / Math.max(1, hi - lo)),
    };
    if (!curves.has(lam)) {
      curves.set(lam, []);
      markers.set(lam, criticalSize(lam));
    }
    curves.get(lam)!.push(point);
  }
  for (const pts of curves.values()) {
    pts.sort((p, q) => p.logSize - q.logSize);
  }
  return { curves, markers };
}

export interface FilledSpan {
  t0: number;
  t1: number;
  x0: number;
  x1: number;
}

export interface BarrierSegment {
  x: number;
  t0: number;
  t1: number; // t0 + barrier height
}

export interface SpaceTimeScene {
  horizon: number;
  halfWidth: number;
  fills: FilledSpan[]; // saturated zones between consecutive dump rows
  barriers: BarrierSegment[];
}

export function spaceTimeScene(
  dump: StateRow[],
  events: TimelineEvent[],
): SpaceTimeScene {
  if (dump.length < 2) {
    throw new Error("state dump needs at least two rows");
  }
  const halfWidth = Math.max(...dump[0].cells.map((c) => Math.abs(c.right)));
  const fills: FilledSpan[] = [];
  for (let i = 0; i < dump.length - 1; i++) {
    const row = dump[i];
    const t1 = dump[i + 1].t;
    for (const cell of row.cells) {
      if (cell.z >= 1.0) {
        fills.push({ t0: row.t, t1, x0: cell.left, x1: cell.right });
      }
    }
  }
  const rowsByTime = new Map(dump.map((r) => [r.t, r]));
  const barriers: BarrierSegment[] = [];
  for (const ev of events) {
    if (ev.kind !== "micro") continue;
    const row = rowsByTime.get(ev.t);
    if (!row) {
      throw new Error(`state dump has no row at event time ${ev.t}`);
    }
    const bp = row.breakpoints.find((b) => b.x === ev.x);
    if (!bp) {
      throw new Error(`dump row at t=${ev.t} has no breakpoint at x=${ev.x}`);
    }
    barriers.push({ x: ev.x, t0: ev.t, t1: ev.t + bp.h });
  }
  return { horizon: dump[dump.length - 1].t, halfWidth, fills, barriers };
}

export interface TrendPoint {
  lambda: number;
  median: number;
  se: number;
}

export function deltaTrendScene(summary: CoupleSummary): TrendPoint[] {
  const points = summary.lambdas.map((lam) => {
    const key = String(lam);
    const median = summary.medians[key];
    if (median === undefined) {
      throw new Error(`couple summary is missing the median for lambda=${key}`);
    }
    return { lambda: lam, median, se: summary.boot_se?.[key] ?? 0 };
  });
  return points.sort((p, q) => q.lambda - p.lambda);
}

export interface TailCurve {
  label: string;
  points: Array<{ B: number; logProb: number }>;
}

export function tailScene(rows: StatsRow[]): TailCurve[] {
  const tails = rows.filter(
    (r) => (r.estimator === "mactail" || r.estimator === "lffp_tail") && r.B !== undefined,
  );
  if (tails.length === 0) {
    throw new Error("no tail estimator rows in the input");
  }
  const groups = new Map<string, TailCurve>();
  for (const row of tails) {
    const label =
      row.estimator + (row.lambda !== undefined ? `@${row.lambda}` : "");
    if (!groups.has(label)) groups.set(label, { label, points: [] });
    const floored = Math.max(row.p_hat, 0.5 / row.n);
    groups.get(label)!.points.push({ B: row.B!, logProb: Math.log(floored) });
  }
  for (const curve of groups.values()) {
    curve.points.sort((p, q) => p.B - q.B);
  }
  return [...groups.values()];
}
