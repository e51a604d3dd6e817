import { describe, expect, it } from "vitest";

import { CSV_COLUMNS, parseRunCsv } from "../src/schema.js";
import { buildSeries, quantile } from "../src/series.js";

function csvOf(rows: Array<Record<string, number | string>>): string {
  const lines = rows.map((row) =>
    CSV_COLUMNS.map((column) => String(row[column] ?? 0)).join(","),
  );
  return [CSV_COLUMNS.join(","), ...lines].join("\n");
}

function gridRows(seeds: number, T: number,
                  value: (seed: number, t: number) => number,
                  column: string = "cum_regret") {
  const rows: Array<Record<string, number | string>> = [];
  for (let seed = 0; seed < seeds; seed++) {
    for (let t = 1; t <= T; t++) {
      rows.push({
        seed, t, loss: 1, cum_regret: 0, est_error: "nan", fw_gap: 0.5,
        wall_time_ns: 1000, [column]: value(seed, t),
      });
    }
  }
  return rows;
}

describe("quantile", () => {
  it("interpolates linearly", () => {
    expect(quantile([1, 2, 3, 4], 0.5)).toBe(2.5);
    expect(quantile([1, 2, 3, 4], 0.25)).toBe(1.75);
    expect(quantile([1, 2, 3, 4], 0)).toBe(1);
    expect(quantile([1, 2, 3, 4], 1)).toBe(4);
    expect(quantile([7], 0.5)).toBe(7);
  });

  it("rejects empty samples and bad q", () => {
    expect(() => quantile([], 0.5)).toThrowError(RangeError);
    expect(() => quantile([1], 1.5)).toThrowError(RangeError);
  });
});

describe("buildSeries", () => {
  it("takes the per-round median and quartiles across seeds", () => {
    // seeds contribute 10*(seed+1) at every round: values 10,20,30,40,50
    const rows = parseRunCsv(
      csvOf(gridRows(5, 3, (seed) => 10 * (seed + 1))), "five.csv",
    );
    const s = buildSeries(rows, "Regret", "five", "five.csv");
    expect(s.x).toEqual([1, 2, 3]);
    expect(s.median).toEqual([30, 30, 30]);
    expect(s.band).not.toBeNull();
    expect(s.band!.lo).toEqual([20, 20, 20]);
    expect(s.band!.hi).toEqual([40, 40, 40]);
    expect(s.seeds).toBe(5);
  });

  it("omits the band for a single seed", () => {
    const rows = parseRunCsv(csvOf(gridRows(1, 4, (_, t) => t)), "one.csv");
    const s = buildSeries(rows, "Regret", "one", "one.csv");
    expect(s.band).toBeNull();
    expect(s.median).toEqual([1, 2, 3, 4]);
  });

  it("rejects seeds on different round grids", () => {
    const rows = parseRunCsv(
      csvOf([...gridRows(1, 4, () => 1),
             ...gridRows(1, 3, () => 1).map((r) => ({ ...r, seed: 1 }))]),
      "ragged.csv",
    );
    expect(() => buildSeries(rows, "Regret", "r", "ragged.csv")).toThrowError(
      /seeds must share the round grid/,
    );
  });

  it("reports the column when the requested metric is all nan", () => {
    const rows = parseRunCsv(
      csvOf(gridRows(2, 2, () => NaN)), "nonconvex.csv",
    );
    expect(() =>
      buildSeries(rows, "Regret", "n", "nonconvex.csv"),
    ).toThrowError(/column "cum_regret" has 2 non-finite value/);
  });

  it("picks the gap column for GapDecay", () => {
    const rows = parseRunCsv(csvOf(gridRows(1, 2, () => 0)), "gap.csv");
    const s = buildSeries(rows, "GapDecay", "gap", "gap.csv");
    expect(s.median).toEqual([0.5, 0.5]);
  });

  it("accumulates median wall time for Suboptimality", () => {
    const rows = parseRunCsv(
      csvOf(gridRows(2, 3, (_, t) => t).map((r, i) => ({
        ...r, loss: 10 - (i % 3), wall_time_ns: 5e8,
      }))),
      "time.csv",
    );
    const s = buildSeries(rows, "Suboptimality", "time", "time.csv");
    expect(s.x).toEqual([0.5, 1.0, 1.5]);
    expect(Math.min(...s.median)).toBe(0);
  });
});
