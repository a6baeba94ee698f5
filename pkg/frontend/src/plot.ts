/** Figure generation from solver CSVs.
 *
 * Usage: node dist/plot.js --spec <spec.json> [--out <path>]
 *
 * Spec schema:
 *   kind: "convergence" | "timeseries"
 *   inputs: [{ path, label? }]          CSV files
 *   output: path of the SVG to write
 *   slopes?: number[]                   convergence guide lines
 *   xColumn?: string                    default "h" / "t"
 *   yColumns?: string[]                 default error / energy columns
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { Table, column, hasColumn, parseCsv } from "./csv.js";
import { Guide, Panel, Series, renderPanels } from "./svg.js";

export interface PlotInput {
  path: string;
  label?: string;
}

export interface PlotSpec {
  kind: "convergence" | "timeseries";
  inputs: PlotInput[];
  output: string;
  slopes?: number[];
  xColumn?: string;
  yColumns?: string[];
}

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b"];
const DASHES = ["6 3", "2 3", "", "8 2 2 2"];

export function validateSpec(spec: PlotSpec): void {
  if (spec.kind !== "convergence" && spec.kind !== "timeseries") {
    throw new Error(`unknown figure kind '${spec.kind}'`);
  }
  if (!spec.inputs || spec.inputs.length === 0) {
    throw new Error("spec needs at least one input CSV");
  }
  if (!spec.output) {
    throw new Error("spec needs an output path");
  }
  for (const s of spec.slopes ?? []) {
    if (!(s > 0)) {
      throw new Error(`reference slopes must be positive, got ${s}`);
    }
  }
}

function markerFor(columnName: string): Series["marker"] {
  if (columnName.includes("_u_")) return "triangle";
  if (columnName.includes("_p_")) return "square";
  return "circle";
}

export function buildConvergence(spec: PlotSpec, tables: Table[]): Panel {
  const xcol = spec.xColumn ?? "h";
  const series: Series[] = [];
  tables.forEach((table, ti) => {
    const ycols = spec.yColumns ??
      table.columns.filter((c) => c.startsWith("err_"));
    if (ycols.length === 0) {
      throw new Error(`no error columns in ${spec.inputs[ti].path}`);
    }
    const x = column(table, xcol);
    for (const yc of ycols) {
      const label = spec.inputs[ti].label
        ? `${spec.inputs[ti].label} ${yc}` : yc;
      series.push({
        label,
        x,
        y: column(table, yc),
        marker: markerFor(yc),
        dash: DASHES[ti % DASHES.length],
        color: COLORS[series.length % COLORS.length],
      });
    }
  });
  const guides: Guide[] = [];
  const anchor = series[0];
  const iMin = anchor.x.indexOf(Math.min(...anchor.x));
  for (const s of spec.slopes ?? []) {
    const x0 = Math.max(...anchor.x);
    const x1 = Math.min(...anchor.x);
    const yAnchor = anchor.y[iMin];
    guides.push({
      label: `slope ${s}`,
      x: [x0, x1],
      y: [yAnchor * Math.pow(x0 / x1, s), yAnchor],
    });
  }
  return {
    title: "convergence",
    xLabel: xcol,
    yLabel: "L2 error",
    logX: true,
    logY: true,
    series,
    guides,
  };
}

export function buildTimeseries(spec: PlotSpec, tables: Table[]): Panel[] {
  const xcol = spec.xColumn ?? "t";
  const defaults = ["ke", "phys_diss", "art_diss"];
  const ycols = spec.yColumns ??
    defaults.filter((c) => tables.every((t) => hasColumn(t, c)));
  if (ycols.length === 0) {
    throw new Error("no time-series columns selected");
  }
  return ycols.map((yc, pi) => ({
    title: yc,
    xLabel: xcol,
    yLabel: yc,
    logX: false,
    logY: false,
    series: tables.map((table, ti) => ({
      label: spec.inputs[ti].label ?? path.basename(spec.inputs[ti].path),
      x: column(table, xcol),
      y: column(table, yc),
      marker: (table.rows.length === 1 ? "circle" : "none") as Series["marker"],
      dash: DASHES[ti % DASHES.length],
      color: COLORS[ti % COLORS.length],
    })),
    guides: [] as Guide[],
  }));
}

export function renderSpec(spec: PlotSpec, baseDir = "."): string {
  validateSpec(spec);
  const tables = spec.inputs.map((inp) =>
    parseCsv(fs.readFileSync(path.resolve(baseDir, inp.path), "utf8")));
  const panels = spec.kind === "convergence"
    ? [buildConvergence(spec, tables)]
    : buildTimeseries(spec, tables);
  return renderPanels(panels);
}

export function main(argv: string[]): number {
  const idx = argv.indexOf("--spec");
  if (idx < 0 || idx + 1 >= argv.length) {
    console.error("usage: plot --spec <spec.json> [--out <path>]");
    return 1;
  }
  const specPath = argv[idx + 1];
  try {
    const spec: PlotSpec = JSON.parse(fs.readFileSync(specPath, "utf8"));
    const outIdx = argv.indexOf("--out");
    if (outIdx >= 0 && outIdx + 1 < argv.length) {
      spec.output = argv[outIdx + 1];
    }
    const svg = renderSpec(spec, path.dirname(specPath));
    const outPath = path.resolve(path.dirname(specPath), spec.output);
    fs.mkdirSync(path.dirname(outPath), { recursive: true });
    fs.writeFileSync(outPath, svg);
    console.log(`wrote ${outPath}`);
    return 0;
  } catch (err) {
    console.error(`plot failed: ${(err as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("plot.js")) {
  process.exit(main(process.argv.slice(2)));
}
