/**
 * The four figure kinds, as pure CSV-to-SVG transforms.
 *
 * Nothing in here recomputes physics: every curve is a column (or an
 * arithmetic combination of columns) of a table the simulator already
 * wrote. Files are rendered fully in memory and only then written, so a
 * failed render leaves no image behind.
 */

import { readFileSync, writeFileSync } from "fs";
import path from "path";

import { ConvergenceRow, DiagnosticsRow, parseConvergence, parseDiagnostics } from "./csv.js";
import { SchemaError } from "./schema.js";
import { Series, buildChart, fmtNum } from "./svg.js";

export const FIGURE_KINDS = ["norm-drift", "field-energy", "picard-distance", "residual-order"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[]; // residual-order takes two or more tables, the rest exactly one
  output: string;
}

const BLUE = "#4361ee";
const RED = "#e63946";
const GREEN = "#2d6a4f";
const GRAY = "#888888";

function finiteMax(values: number[]): number {
  let m = -Infinity;
  for (const v of values) if (Number.isFinite(v) && v > m) m = v;
  return m;
}

export function normDriftChart(rows: DiagnosticsRow[], source: string): string {
  const drift = rows.map((r) => r.l2_norm - 1);
  const worst = finiteMax(drift.map(Math.abs));
  return buildChart({
    title: "Wavefunction norm drift",
    subtitle: `${rows.length} nodes from ${source}; max |drift| ${fmtNum(worst)}`,
    xLabel: "time",
    yLabel: "l2 norm - 1",
    series: [{ x: rows.map((r) => r.time), y: drift, color: BLUE, label: "norm drift" }],
  });
}

export function fieldEnergyChart(rows: DiagnosticsRow[], source: string): string {
  return buildChart({
    title: "Field energy",
    subtitle: `${rows.length} nodes from ${source}`,
    xLabel: "time",
    yLabel: "field energy",
    series: [{ x: rows.map((r) => r.time), y: rows.map((r) => r.field_energy), color: GREEN, label: "field energy" }],
  });
}

export function picardDistanceChart(rows: ConvergenceRow[], source: string): string {
  // row order, not the iteration column: the counter restarts when the
  // horizon is re-covered in segments
  const idx = rows.map((_, i) => i + 1);
  const pick = (f: (r: ConvergenceRow) => number) => rows.map(f);
  return buildChart({
    title: "Fixed-point iteration distance",
    subtitle: `${rows.length} iterations from ${source} (log scale; exact zeros not shown)`,
    xLabel: "iteration",
    yLabel: "distance between iterates",
    logY: true,
    series: [
      { x: idx, y: pick((r) => r.d), color: BLUE, label: "total", width: 1.8, markers: true },
      { x: idx, y: pick((r) => r.d_psi), color: RED, label: "wavefunction part", width: 1 },
      { x: idx, y: pick((r) => r.d_A_half), color: GREEN, label: "field part", width: 1 },
      { x: idx, y: pick((r) => r.d_A_44), color: GRAY, label: "field space-time part", width: 1 },
    ],
  });
}

interface OrderPoint {
  dt: number;
  schrodinger: number;
  kg: number;
}

function orderPoint(rows: DiagnosticsRow[], source: string): OrderPoint {
  if (rows.length < 2) {
    throw new SchemaError(`${source}: need at least two time nodes to read off dt`);
  }
  return {
    dt: rows[1].time - rows[0].time,
    schrodinger: finiteMax(rows.map((r) => r.schrodinger_residual)),
    kg: finiteMax(rows.map((r) => r.kg_residual)),
  };
}

/** Endpoint slope of log(residual) against log(dt). */
function slopeOf(points: OrderPoint[], get: (p: OrderPoint) => number): number {
  const lo = points[0];
  const hi = points[points.length - 1];
  return Math.log(get(hi) / get(lo)) / Math.log(hi.dt / lo.dt);
}

export function residualOrderChart(tables: { rows: DiagnosticsRow[]; source: string }[]): string {
  if (tables.length < 2) {
    throw new SchemaError("residual-order needs two or more diagnostics tables, one per dt");
  }
  const points = tables.map((t) => orderPoint(t.rows, t.source)).sort((a, b) => a.dt - b.dt);
  const dts = points.map((p) => p.dt);
  const anchor = points[points.length - 1];
  const reference = dts.map((dt) => anchor.schrodinger * Math.pow(dt / anchor.dt, 2));

  const slopes = [`schrodinger ${slopeOf(points, (p) => p.schrodinger).toFixed(2)}`];
  if (points.every((p) => p.kg > 0)) {
    slopes.push(`wave ${slopeOf(points, (p) => p.kg).toFixed(2)}`);
  }
  return buildChart({
    title: "Residual order under time refinement",
    subtitle: `measured slopes: ${slopes.join(", ")} (reference line is slope 2)`,
    xLabel: "dt",
    yLabel: "max residual",
    logX: true,
    logY: true,
    series: [
      { x: dts, y: points.map((p) => p.schrodinger), color: BLUE, label: "schrodinger residual", markers: true },
      { x: dts, y: points.map((p) => p.kg), color: RED, label: "wave residual", markers: true },
      { x: dts, y: reference, color: GRAY, label: "slope 2 reference", dash: "6,3", width: 1 },
    ],
  });
}

function readTable(file: string): string {
  try {
    return readFileSync(file, "utf-8");
  } catch (err) {
    throw new SchemaError(`${file}: ${(err as Error).message}`);
  }
}

function requireOneInput(spec: FigureSpec): string {
  if (spec.inputs.length !== 1) {
    throw new SchemaError(`${spec.kind} takes exactly one CSV, got ${spec.inputs.length}`);
  }
  return spec.inputs[0];
}

/** Render a figure to an SVG string without touching the output path. */
export function renderFigure(spec: FigureSpec): string {
  switch (spec.kind) {
    case "norm-drift": {
      const file = requireOneInput(spec);
      return normDriftChart(parseDiagnostics(readTable(file), file), path.basename(file));
    }
    case "field-energy": {
      const file = requireOneInput(spec);
      return fieldEnergyChart(parseDiagnostics(readTable(file), file), path.basename(file));
    }
    case "picard-distance": {
      const file = requireOneInput(spec);
      return picardDistanceChart(parseConvergence(readTable(file), file), path.basename(file));
    }
    case "residual-order": {
      return residualOrderChart(
        spec.inputs.map((file) => ({ rows: parseDiagnostics(readTable(file), file), source: path.basename(file) }))
      );
    }
  }
}

/** Render, then write; the image appears only after a clean render. */
export function writeFigure(spec: FigureSpec): void {
  const svg = renderFigure(spec);
  writeFileSync(spec.output, svg);
}

/** Every figure kind a diagnostics table supports, written next to each other. */
export function plotDiagnostics(csvPath: string, outDir: string): string[] {
  const stem = path.basename(csvPath).replace(/\.csv$/, "");
  const outputs: string[] = [];
  for (const kind of ["norm-drift", "field-energy"] as const) {
    const output = path.join(outDir, `${stem}_${kind.replace("-", "_")}.svg`);
    writeFigure({ kind, inputs: [csvPath], output });
    outputs.push(output);
  }
  return outputs;
}
