import { describe, expect, it } from "vitest";
import { existsSync, mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { FIGURES } from "../src/figures.js";
import { main } from "../src/cli.js";
import { encodePng } from "../src/png.js";

const DATA = join(__dirname, "..", "testdata");

function expectPng(buf: Buffer) {
  expect(buf.subarray(0, 8)).toEqual(
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
  );
  expect(buf.subarray(12, 16).toString("ascii")).toBe("IHDR");
  expect(buf.subarray(buf.length - 8, buf.length - 4).toString("ascii")).toBe("IEND");
}

describe("png encoder", () => {
  it("writes a structurally valid file with the declared dimensions", () => {
    const png = encodePng(3, 2, new Uint8Array(3 * 2 * 4).fill(255));
    expectPng(png);
    expect(png.readUInt32BE(16)).toBe(3);
    expect(png.readUInt32BE(20)).toBe(2);
  });

  it("rejects a wrong-sized pixel buffer", () => {
    expect(() => encodePng(2, 2, new Uint8Array(7))).toThrow(/pixel buffer/);
  });
});

describe("figure rendering on the shipped samples", () => {
  it("cluster_size_loglog renders", () => {
    expectPng(FIGURES.cluster_size_loglog([join(DATA, "stats_windows.csv")]));
  });

  it("space_time_diagram renders", () => {
    expectPng(
      FIGURES.space_time_diagram([
        join(DATA, "state_dump.txt"),
        join(DATA, "timeline.csv"),
      ]),
    );
  });

  it("delta_T_vs_lambda renders", () => {
    expectPng(FIGURES.delta_T_vs_lambda([join(DATA, "couple_summary.json")]));
  });

  it("tail_vs_B renders", () => {
    expectPng(FIGURES.tail_vs_B([join(DATA, "stats_tails.csv")]));
  });
});

describe("cli", () => {
  it("writes the requested PNG", () => {
    const out = join(mkdtempSync(join(tmpdir(), "plots-")), "fig.png");
    const code = main([
      "cluster_size_loglog",
      "--in", join(DATA, "stats_windows.csv"),
      "--out", out,
      "--width", "400",
      "--height", "300",
    ]);
    expect(code).toBe(0);
    expect(existsSync(out)).toBe(true);
    const png = readFileSync(out);
    expectPng(png);
    expect(png.readUInt32BE(16)).toBe(400);
  });

  it("uses default dimensions when none are given", () => {
    const out = join(mkdtempSync(join(tmpdir(), "plots-")), "fig.png");
    const code = main([
      "space_time_diagram",
      "--in", join(DATA, "state_dump.txt"),
      "--in", join(DATA, "timeline.csv"),
      "--out", out,
    ]);
    expect(code).toBe(0);
    const png = readFileSync(out);
    expectPng(png);
    expect(png.readUInt32BE(16)).toBe(800);
  });

  it("fails cleanly on an empty input file", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const code = main([
      "cluster_size_loglog",
      "--in", join(dir, "missing.csv"),
      "--out", join(dir, "fig.png"),
    ]);
    expect(code).toBe(1);
  });

  it("rejects unknown figure kinds", () => {
    expect(main(["nonsense", "--in", "x", "--out", "y"])).toBe(1);
  });
});
