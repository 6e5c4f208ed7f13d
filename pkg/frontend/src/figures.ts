/** Rasterization of the four figure kinds. */

import {
  parseCoupleSummary,
  parseStateDump,
  parseStatsCsv,
  parseTimelineCsv,
} from "./data.js";
import {
  Axes,
  BARRIER,
  BLACK,
  FILL,
  GREY,
  MARKER,
  Raster,
  SERIES,
} from "./raster.js";
import {
  deltaTrendScene,
  sizeLawScene,
  spaceTimeScene,
  tailScene,
} from "./scenes.js";

export interface FigureOptions {
  width: number;
  height: number;
}

const DEFAULTS: FigureOptions = { width: 800, height: 560 };

export function plotClusterSize(
  inputs: string[],
  opts: Partial<FigureOptions> = {},
): Buffer {
  const { width, height } = { ...DEFAULTS, ...opts };
  const rows = inputs.flatMap(parseStatsCsv);
  const scene = sizeLawScene(rows);
  const xs: number[] = [];
  const ys: number[] = [];
  for (const pts of scene.curves.values()) {
    for (const p of pts) {
      xs.push(p.logSize);
      ys.push(p.logProb);
    }
  }
  for (const marker of scene.markers.values()) {
    xs.push(Math.log(marker));
  }
  const raster = new Raster(width, height);
  const axes = new Axes(
    raster,
    Math.min(...xs) - 0.5,
    Math.max(...xs) + 0.5,
    Math.min(...ys) - 0.5,
    Math.max(...ys) + 0.5,
  );
  axes.frame();
  let k = 0;
  for (const [lam, pts] of scene.curves) {
    const color = SERIES[k++ % SERIES.length];
    axes.polyline(
      pts.map((p) => [p.logSize, p.logProb] as [number, number]),
      color,
    );
    for (const p of pts) {
      raster.disc(axes.px(p.logSize), axes.py(p.logProb), 3, color);
    }
    const mx = axes.px(Math.log(scene.markers.get(lam)!));
    raster.line(mx, axes.py(axes.y1), mx, axes.py(axes.y0), MARKER);
  }
  return raster.png();
}

export function plotSpaceTime(
  inputs: string[],
  opts: Partial<FigureOptions> = {},
): Buffer {
  const { width, height } = { ...DEFAULTS, ...opts };
  if (inputs.length < 2) {
    throw new Error("space_time needs the state dump and the timeline CSV");
  }
  const dump = parseStateDump(inputs[0]);
  const events = parseTimelineCsv(inputs[1]);
  const scene = spaceTimeScene(dump, events);
  const raster = new Raster(width, height);
  const axes = new Axes(raster, -scene.halfWidth, scene.halfWidth, 0, scene.horizon);
  for (const f of scene.fills) {
    raster.fillRect(axes.px(f.x0), axes.py(f.t1), axes.px(f.x1), axes.py(f.t0), FILL);
  }
  for (const b of scene.barriers) {
    const x = axes.px(b.x);
    raster.fillRect(x - 1, axes.py(b.t1), x + 1, axes.py(b.t0), BARRIER);
  }
  for (const ev of events) {
    if (ev.kind === "macro") {
      raster.disc(axes.px(ev.x), axes.py(ev.t), 3, BLACK);
    }
  }
  axes.frame();
  return raster.png();
}

export function plotDeltaTrend(
  inputs: string[],
  opts: Partial<FigureOptions> = {},
): Buffer {
  const { width, height } = { ...DEFAULTS, ...opts };
  const points = deltaTrendScene(parseCoupleSummary(inputs[0]));
  const xs = points.map((p) => Math.log10(1.0 / p.lambda));
  const raster = new Raster(width, height);
  const lo = Math.min(...points.map((p) => p.median - 2 * p.se));
  const hi = Math.max(...points.map((p) => p.median + 2 * p.se));
  const axes = new Axes(raster, Math.min(...xs) - 0.5, Math.max(...xs) + 0.5,
    Math.max(0, lo - 0.2), hi + 0.2);
  axes.frame();
  axes.polyline(points.map((p, i) => [xs[i], p.median] as [number, number]), SERIES[0]);
  points.forEach((p, i) => {
    raster.disc(axes.px(xs[i]), axes.py(p.median), 4, SERIES[0]);
    raster.line(
      axes.px(xs[i]), axes.py(p.median - 2 * p.se),
      axes.px(xs[i]), axes.py(p.median + 2 * p.se), GREY,
    );
  });
  return raster.png();
}

export function plotTail(
  inputs: string[],
  opts: Partial<FigureOptions> = {},
): Buffer {
  const { width, height } = { ...DEFAULTS, ...opts };
  const curves = tailScene(inputs.flatMap(parseStatsCsv));
  const allB = curves.flatMap((c) => c.points.map((p) => p.B));
  const allY = curves.flatMap((c) => c.points.map((p) => p.logProb));
  const raster = new Raster(width, height);
  const axes = new Axes(raster, 0, Math.max(...allB) + 1,
    Math.min(...allY) - 0.5, Math.max(...allY) + 0.5);
  axes.frame();
  curves.forEach((curve, k) => {
    const color = SERIES[k % SERIES.length];
    axes.polyline(curve.points.map((p) => [p.B, p.logProb] as [number, number]), color);
    for (const p of curve.points) {
      raster.disc(axes.px(p.B), axes.py(p.logProb), 3, color);
    }
  });
  return raster.png();
}

export const FIGURES: Record<string, (inputs: string[], opts?: Partial<FigureOptions>) => Buffer> = {
  cluster_size_loglog: plotClusterSize,
  space_time_diagram: plotSpaceTime,
  delta_T_vs_lambda: plotDeltaTrend,
  tail_vs_B: plotTail,
};
