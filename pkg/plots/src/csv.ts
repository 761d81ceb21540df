/**
 * Readers for the two simulator tables.
 *
 * Both formats are plain CSV behind a version comment. Later comment lines
 * (the convergence log marks horizon-segment boundaries that way) are
 * skipped. Empty cells mean "not defined at this row" (the first diagnostics
 * row has no residuals yet, the first log entry has no ratio) and parse to
 * NaN so downstream code can filter them out.
 */

import { CONVERGENCE_SCHEMA, DIAGNOSTICS_SCHEMA, SchemaError, checkHeaderLine, checkSchemaLine } from "./schema.js";

export const DIAGNOSTICS_COLUMNS = [
  "time",
  "l2_norm",
  "h2_norm",
  "field_energy",
  "div_residual_A",
  "div_residual_Adot",
  "symmetry_residual",
  "schrodinger_residual",
  "kg_residual",
];

export const CONVERGENCE_COLUMNS = ["iteration", "d", "d_psi", "d_A_half", "d_A_44", "ratio", "wall_time"];

export interface DiagnosticsRow {
  time: number;
  l2_norm: number;
  h2_norm: number;
  field_energy: number;
  div_residual_A: number;
  div_residual_Adot: number;
  symmetry_residual: number;
  schrodinger_residual: number;
  kg_residual: number;
}

export interface ConvergenceRow {
  iteration: number;
  d: number;
  d_psi: number;
  d_A_half: number;
  d_A_44: number;
  ratio: number;
  wall_time: number;
}

function parseCell(cell: string, source: string, lineNo: number): number {
  if (cell === "") return NaN;
  const v = Number(cell);
  if (Number.isNaN(v)) {
    throw new SchemaError(`${source}:${lineNo}: not a number: '${cell}'`);
  }
  return v;
}

function parseTable(text: string, schema: string, columns: string[], source: string): number[][] {
  const lines = text.split("\n");
  checkSchemaLine(lines[0], schema, source);
  checkHeaderLine(lines[1], columns, source);
  const rows: number[][] = [];
  for (let i = 2; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "" || line.startsWith("#")) continue;
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new SchemaError(`${source}:${i + 1}: ${cells.length} cells for ${columns.length} columns`);
    }
    rows.push(cells.map((c) => parseCell(c, source, i + 1)));
  }
  if (rows.length === 0) {
    throw new SchemaError(`${source}: no data rows`);
  }
  return rows;
}

export function parseDiagnostics(text: string, source = "diagnostics"): DiagnosticsRow[] {
  return parseTable(text, DIAGNOSTICS_SCHEMA, DIAGNOSTICS_COLUMNS, source).map((r) => ({
    time: r[0],
    l2_norm: r[1],
    h2_norm: r[2],
    field_energy: r[3],
    div_residual_A: r[4],
    div_residual_Adot: r[5],
    symmetry_residual: r[6],
    schrodinger_residual: r[7],
    kg_residual: r[8],
  }));
}

export function parseConvergence(text: string, source = "convergence"): ConvergenceRow[] {
  return parseTable(text, CONVERGENCE_SCHEMA, CONVERGENCE_COLUMNS, source).map((r) => ({
    iteration: r[0],
    d: r[1],
    d_psi: r[2],
    d_A_half: r[3],
    d_A_44: r[4],
    ratio: r[5],
    wall_time: r[6],
  }));
}
