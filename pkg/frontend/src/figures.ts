/**
 * Figure specifications and the data series behind each figure kind.
 *
 * Four kinds are supported, matching the benchmark's standard plots:
 *   error_vs_iter -- objective error per iteration (log y)
 *   error_vs_tc   -- objective error against cumulative communication cost (log y)
 *   acv_vs_iter   -- consensus violation per iteration (log y)
 *   cdf_tc        -- empirical CDF of per-trial total communication cost
 */

import * as fs from "fs";
import { booleanColumn, column, parseCsv, SchemaError } from "./csv.js";

export const FIGURE_KINDS = [
  "error_vs_iter",
  "error_vs_tc",
  "cdf_tc",
  "acv_vs_iter",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  labels?: string[];
  output: string;
  title?: string;
}

export interface Series {
  label: string;
  points: Array<[number, number]>;
  /** render as steps (CDF) instead of straight segments */
  step?: boolean;
}

export interface FigureData {
  series: Series[];
  xLabel: string;
  yLabel: string;
  logY: boolean;
}

export function parseSpec(path: string): FigureSpec {
  const raw = JSON.parse(fs.readFileSync(path, "utf8"));
  return validateSpec(raw);
}

export function validateSpec(raw: unknown): FigureSpec {
  const spec = raw as Partial<FigureSpec>;
  if (!spec || typeof spec !== "object") {
    throw new SchemaError("spec: must be a JSON object");
  }
  if (!FIGURE_KINDS.includes(spec.kind as FigureKind)) {
    throw new SchemaError(`spec.kind: must be one of ${FIGURE_KINDS.join(", ")}`);
  }
  if (!Array.isArray(spec.inputs) || spec.inputs.length === 0) {
    throw new SchemaError("spec.inputs: need at least one input file");
  }
  for (const p of spec.inputs) {
    if (!fs.existsSync(p)) {
      throw new SchemaError(`spec.inputs: no such file: ${p}`);
    }
  }
  if (spec.labels && spec.labels.length !== spec.inputs.length) {
    throw new SchemaError("spec.labels: one label per input required");
  }
  if (typeof spec.output !== "string" || spec.output.length === 0) {
    throw new SchemaError("spec.output: missing output path");
  }
  return spec as FigureSpec;
}

function baseName(path: string): string {
  const parts = path.split(/[\\/]/);
  return parts[parts.length - 1].replace(/\.[^.]+$/, "");
}

/** Empirical CDF steps over the converged trials' costs: 0 up to 1. */
export function empiricalCdf(costs: number[]): Array<[number, number]> {
  const sorted = [...costs].sort((a, b) => a - b);
  const n = sorted.length;
  const points: Array<[number, number]> = [[sorted[0], 0]];
  sorted.forEach((c, i) => points.push([c, (i + 1) / n]));
  return points;
}

export function loadFigureData(spec: FigureSpec): FigureData {
  const labels = spec.labels ?? spec.inputs.map(baseName);
  const series: Series[] = [];

  for (let i = 0; i < spec.inputs.length; i += 1) {
    const path = spec.inputs[i];
    const table = parseCsv(path);
    if (spec.kind === "cdf_tc") {
      const tc = column(table, "tc", path);
      const converged = booleanColumn(table, "converged", path);
      const costs = tc.filter((_, j) => converged[j]);
      if (costs.length === 0) {
        throw new SchemaError(`${path}: no converged trials to build a CDF from`);
      }
      series.push({ label: labels[i], points: empiricalCdf(costs), step: true });
      continue;
    }
    const yName = spec.kind === "acv_vs_iter" ? "acv" : "objective_error";
    const xName = spec.kind === "error_vs_tc" ? "tc_cumulative" : "iter";
    const xs = column(table, xName, path);
    const ys = column(table, yName, path);
    // log-scale y: zero or negative values cannot be drawn
    const points = xs
      .map((x, j) => [x, ys[j]] as [number, number])
      .filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y) && y > 0);
    if (points.length === 0) {
      throw new SchemaError(`${path}: no drawable points for ${spec.kind}`);
    }
    series.push({ label: labels[i], points });
  }

  switch (spec.kind) {
    case "error_vs_iter":
      return { series, xLabel: "iteration", yLabel: "objective error", logY: true };
    case "error_vs_tc":
      return { series, xLabel: "total communication cost", yLabel: "objective error", logY: true };
    case "acv_vs_iter":
      return { series, xLabel: "iteration", yLabel: "consensus violation", logY: true };
    case "cdf_tc":
      return { series, xLabel: "total communication cost", yLabel: "empirical CDF", logY: false };
  }
}
