/**
 * Batch SVG emitter. Everything is computed from the parsed rows, so
 * identical inputs produce byte-identical figures.
 */

import { extent } from "d3-array";
import { scaleLinear, scaleLog, type ScaleContinuousNumeric } from "d3-scale";
import { area, line } from "d3-shape";

import { AXIS_LABELS, buildSeries, type PlotKind, type Series } from "./series.js";
import { parseRunCsv } from "./schema.js";

export interface PlotSpec {
  /** One CSV per series; the legend uses the file stem as the label. */
  csvPaths: string[];
  kind: PlotKind;
  outPath: string;
  logX?: boolean;
  logY?: boolean;
}

export interface NamedCsv {
  name: string;
  text: string;
}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 24, right: 24, bottom: 52, left: 72 };

const PALETTE = [
  "#4c78a8",
  "#e45756",
  "#54a24b",
  "#f58518",
  "#72b7b2",
  "#b279a2",
];

function fileStem(path: string): string {
  const base = path.split(/[\\/]/).pop() ?? path;
  return base.replace(/\.[^.]*$/, "");
}

type Scale = ScaleContinuousNumeric<number, number>;

function makeScale(log: boolean, domain: [number, number],
                   range: [number, number], axis: string): Scale {
  if (log) {
    if (domain[1] <= 0) {
      throw new RangeError(
        `log ${axis} axis needs positive values, domain is ` +
          `[${domain[0]}, ${domain[1]}]`,
      );
    }
    return scaleLog().domain(domain).range(range).nice();
  }
  return scaleLinear().domain(domain).range(range).nice();
}

function filterPositive(series: Series[], logX: boolean,
                        logY: boolean): Series[] {
  if (!logX && !logY) return series;
  // log axes cannot show nonpositive points; drop them per series
  return series.map((s) => {
    const keep = s.x.map(
      (x, i) => (!logX || x > 0) && (!logY || s.median[i]! > 0),
    );
    const pick = (v: number[]) => v.filter((_, i) => keep[i]);
    return {
      ...s,
      x: pick(s.x),
      median: pick(s.median),
      band: s.band === null
        ? null
        : { lo: pick(s.band.lo), hi: pick(s.band.hi) },
    };
  });
}

function fmt(value: number): string {
  return String(parseFloat(value.toPrecision(6)));
}

function axisTicks(scale: Scale, count: number): number[] {
  const ticks = scale.ticks(count);
  // scaleLog can emit a dense minor grid; thin it to decade-ish marks
  if (ticks.length > count + 2) {
    const step = Math.ceil(ticks.length / count);
    return ticks.filter((_, i) => i % step === 0);
  }
  return ticks;
}

/** Render already-read CSVs; pure in its inputs. */
export function composeFigure(inputs: NamedCsv[], kind: PlotKind,
                              logX = false, logY = false): string {
  if (inputs.length === 0) {
    throw new RangeError("need at least one input CSV");
  }
  let series = inputs.map((input) =>
    buildSeries(parseRunCsv(input.text, input.name), kind,
                fileStem(input.name), input.name),
  );
  series = filterPositive(series, logX, logY);
  if (series.some((s) => s.x.length === 0)) {
    const empty = series.find((s) => s.x.length === 0)!;
    throw new RangeError(
      `series "${empty.label}" has no drawable points under the ` +
        `requested log axes`,
    );
  }

  const xs = series.flatMap((s) => s.x);
  const ys = series.flatMap((s) =>
    s.band === null ? s.median : [...s.median, ...s.band.lo, ...s.band.hi],
  );
  const [x0, x1] = extent(xs) as [number, number];
  const [y0, y1] = extent(ys) as [number, number];
  const xScale = makeScale(logX, [x0, x1], [MARGIN.left, WIDTH - MARGIN.right], "x");
  const yScale = makeScale(logY, [y0, y1 === y0 ? y0 + 1 : y1],
                           [HEIGHT - MARGIN.bottom, MARGIN.top], "y");

  const medianPath = (s: Series): string =>
    line<number>()
      .x((_, i) => xScale(s.x[i]!))
      .y((d) => yScale(d))(s.median) ?? "";
  const bandPath = (s: Series): string =>
    area<number>()
      .x((_, i) => xScale(s.x[i]!))
      .y0((_, i) => yScale(s.band!.lo[i]!))
      .y1((d) => yScale(d))(s.band!.hi) ?? "";

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" ` +
      `height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" ` +
      `font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  const plotBottom = HEIGHT - MARGIN.bottom;
  for (const tick of axisTicks(xScale, 6)) {
    const px = xScale(tick);
    parts.push(
      `<line x1="${fmt(px)}" y1="${plotBottom}" x2="${fmt(px)}" ` +
        `y2="${plotBottom + 5}" stroke="#333"/>`,
      `<text x="${fmt(px)}" y="${plotBottom + 18}" text-anchor="middle" ` +
        `class="tick-label">${fmt(tick)}</text>`,
    );
  }
  for (const tick of axisTicks(yScale, 6)) {
    const py = yScale(tick);
    parts.push(
      `<line x1="${MARGIN.left - 5}" y1="${fmt(py)}" x2="${MARGIN.left}" ` +
        `y2="${fmt(py)}" stroke="#333"/>`,
      `<text x="${MARGIN.left - 8}" y="${fmt(py + 4)}" text-anchor="end" ` +
        `class="tick-label">${fmt(tick)}</text>`,
      `<line x1="${MARGIN.left}" y1="${fmt(py)}" ` +
        `x2="${WIDTH - MARGIN.right}" y2="${fmt(py)}" stroke="#eee"/>`,
    );
  }
  parts.push(
    `<line x1="${MARGIN.left}" y1="${plotBottom}" ` +
      `x2="${WIDTH - MARGIN.right}" y2="${plotBottom}" stroke="#333"/>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" ` +
      `y2="${plotBottom}" stroke="#333"/>`,
  );

  const labels = AXIS_LABELS[kind];
  parts.push(
    `<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" ` +
      `y="${HEIGHT - 12}" text-anchor="middle" class="axis-label">` +
      `${labels.x}</text>`,
    `<text transform="rotate(-90)" x="${-(MARGIN.top + plotBottom) / 2}" ` +
      `y="20" text-anchor="middle" class="axis-label">${labels.y}</text>`,
  );

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    if (s.band !== null) {
      parts.push(
        `<path class="iqr-band" d="${bandPath(s)}" fill="${color}" ` +
          `fill-opacity="0.18" stroke="none"/>`,
      );
    }
    parts.push(
      `<path class="median-line" d="${medianPath(s)}" fill="none" ` +
        `stroke="${color}" stroke-width="1.8"/>`,
    );
  });

  parts.push(`<g class="legend">`);
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    const ly = MARGIN.top + 10 + i * 18;
    const lx = WIDTH - MARGIN.right - 170;
    parts.push(
      `<rect x="${lx}" y="${ly - 9}" width="12" height="12" fill="${color}"/>`,
      `<text x="${lx + 18}" y="${ly + 1}" class="legend-label">` +
        `${s.label} (${s.seeds} seed${s.seeds === 1 ? "" : "s"})</text>`,
    );
  });
  parts.push(`</g>`);
  parts.push(`</svg>`);
  return parts.join("\n");
}

/** Read the named CSVs, render, and write the figure file. */
export async function render(spec: PlotSpec): Promise<string> {
  const { readFile, writeFile } = await import("node:fs/promises");
  if (spec.csvPaths.length === 0) {
    throw new RangeError("PlotSpec needs at least one input CSV");
  }
  const inputs: NamedCsv[] = [];
  for (const path of spec.csvPaths) {
    inputs.push({ name: path, text: await readFile(path, "utf8") });
  }
  const svg = composeFigure(inputs, spec.kind, spec.logX ?? false,
                            spec.logY ?? false);
  await writeFile(spec.outPath, svg + "\n", "utf8");
  return svg;
}
