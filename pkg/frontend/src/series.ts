/**
 * From raw run rows to drawable series: one median trace per input
 * file with an inter-quartile band across that file's seeds.
 */

import { SchemaError, type CsvColumn, type RunRow } from "./schema.js";

export type PlotKind = "Regret" | "PerRoundTime" | "Suboptimality" | "GapDecay";

export const PLOT_KINDS: readonly PlotKind[] = [
  "Regret",
  "PerRoundTime",
  "Suboptimality",
  "GapDecay",
];

/** Fixed axis labelling; the figure kind decides it, never the caller. */
export const AXIS_LABELS: Record<PlotKind, { x: string; y: string }> = {
  Regret: { x: "round t", y: "cumulative regret" },
  PerRoundTime: { x: "round t", y: "per-round time (ns)" },
  Suboptimality: { x: "elapsed time (s)", y: "suboptimality" },
  GapDecay: { x: "round t", y: "Frank-Wolfe gap" },
};

const VALUE_COLUMN: Record<PlotKind, CsvColumn> = {
  Regret: "cum_regret",
  PerRoundTime: "wall_time_ns",
  Suboptimality: "loss",
  GapDecay: "fw_gap",
};

export interface Series {
  label: string;
  x: number[];
  median: number[];
  /** q25/q75 across seeds; null when the file holds a single seed. */
  band: { lo: number[]; hi: number[] } | null;
  seeds: number;
}

/** Linear-interpolation quantile of an unsorted sample. */
export function quantile(values: readonly number[], q: number): number {
  if (values.length === 0 || q < 0 || q > 1) {
    throw new RangeError(`quantile needs values and q in [0, 1], got ${q}`);
  }
  const sorted = [...values].sort((a, b) => a - b);
  const pos = q * (sorted.length - 1);
  const lower = Math.floor(pos);
  const upper = Math.ceil(pos);
  const frac = pos - lower;
  return sorted[lower]! * (1 - frac) + sorted[upper]! * frac;
}

function groupBySeed(rows: RunRow[], file: string): Map<number, RunRow[]> {
  const bySeed = new Map<number, RunRow[]>();
  for (const row of rows) {
    const group = bySeed.get(row.seed);
    if (group === undefined) {
      bySeed.set(row.seed, [row]);
    } else {
      group.push(row);
    }
  }
  let reference: number[] | null = null;
  for (const [seed, group] of bySeed) {
    group.sort((a, b) => a.t - b.t);
    const ts = group.map((r) => r.t);
    if (reference === null) {
      reference = ts;
    } else if (
      ts.length !== reference.length ||
      ts.some((t, i) => t !== reference![i])
    ) {
      throw new SchemaError(
        `seed ${seed} covers ${ts.length} rounds but another seed covers ` +
          `${reference.length} in ${file}; seeds must share the round grid`,
        file, "t",
      );
    }
  }
  return bySeed;
}

/**
 * Collapse one file's rows into a drawable series.
 *
 * The y column is set by the kind. Regret on a nonconvex run (all-NaN
 * column) is a usage error and is reported by column name rather than
 * silently drawing nothing.
 */
export function buildSeries(rows: RunRow[], kind: PlotKind, label: string,
                            file: string): Series {
  const column = VALUE_COLUMN[kind];
  const bySeed = groupBySeed(rows, file);
  const groups = [...bySeed.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([, group]) => group);
  const nRounds = groups[0]!.length;

  const median: number[] = [];
  const lo: number[] = [];
  const hi: number[] = [];
  for (let i = 0; i < nRounds; i++) {
    const values = groups.map((g) => g[i]![column]);
    const bad = values.filter((v) => !Number.isFinite(v)).length;
    if (bad > 0) {
      throw new SchemaError(
        `column "${column}" has ${bad} non-finite value(s) at round ` +
          `${groups[0]![i]!.t} in ${file}; cannot draw ${kind}`,
        file, column,
      );
    }
    median.push(quantile(values, 0.5));
    lo.push(quantile(values, 0.25));
    hi.push(quantile(values, 0.75));
  }

  let x: number[];
  let y = median;
  let bandLo = lo;
  let bandHi = hi;
  if (kind === "Suboptimality") {
    // x is elapsed median wall time; y is the drop from the best
    // median loss seen in this file, so every series bottoms out at 0
    const timeNs = groups[0]!.map((_, i) =>
      quantile(groups.map((g) => g[i]!.wall_time_ns), 0.5),
    );
    x = [];
    let acc = 0;
    for (const dt of timeNs) {
      acc += dt;
      x.push(acc / 1e9);
    }
    const best = Math.min(...median);
    y = median.map((v) => v - best);
    bandLo = lo.map((v) => v - best);
    bandHi = hi.map((v) => v - best);
  } else {
    x = groups[0]!.map((r) => r.t);
  }

  return {
    label,
    x,
    median: y,
    band: groups.length > 1 ? { lo: bandLo, hi: bandHi } : null,
    seeds: groups.length,
  };
}
