export { CSV_COLUMNS, SchemaError, parseRunCsv } from "./schema.js";
export type { CsvColumn, RunRow } from "./schema.js";
export { AXIS_LABELS, PLOT_KINDS, buildSeries, quantile } from "./series.js";
export type { PlotKind, Series } from "./series.js";
export { composeFigure, render } from "./figure.js";
export type { NamedCsv, PlotSpec } from "./figure.js";
