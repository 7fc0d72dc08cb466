export { COLUMNS, EmptyData, ParseError, parseSweepCsv } from "./csv.js";
export type { SweepData, SweepRow } from "./csv.js";
export { renderBerSvg, toCurve } from "./chart.js";
export type { ChartOptions, Curve } from "./chart.js";
export { buildSvg, main, parseArgs, UsageError } from "./cli.js";
export type { PlotArgs } from "./cli.js";
