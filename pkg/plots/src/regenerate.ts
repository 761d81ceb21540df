/**
 * Rebuild every bundled figure from the shipped sample tables.
 *
 * The samples are genuine simulator outputs (a free particle, the bundled
 * small-data scenario, and one charged run at three time resolutions), so
 * this doubles as an end-to-end check of the CSV contract.
 */

import path from "path";
import { fileURLToPath, pathToFileURL } from "url";

import { FigureSpec, writeFigure } from "./figures.js";

const ROOT = path.join(path.dirname(fileURLToPath(import.meta.url)), "..");
const DATA = path.join(ROOT, "sample_data");
const FIGS = path.join(ROOT, "figures");

export const BUNDLED: FigureSpec[] = [
  {
    kind: "norm-drift",
    inputs: [path.join(DATA, "free_particle_diagnostics.csv")],
    output: path.join(FIGS, "free_particle_norm_drift.svg"),
  },
  {
    kind: "field-energy",
    inputs: [path.join(DATA, "small_data_diagnostics.csv")],
    output: path.join(FIGS, "small_data_field_energy.svg"),
  },
  {
    kind: "picard-distance",
    inputs: [path.join(DATA, "small_data_convergence.csv")],
    output: path.join(FIGS, "small_data_picard_distance.svg"),
  },
  {
    kind: "residual-order",
    inputs: [
      path.join(DATA, "order_nodes10_diagnostics.csv"),
      path.join(DATA, "order_nodes20_diagnostics.csv"),
      path.join(DATA, "order_nodes40_diagnostics.csv"),
    ],
    output: path.join(FIGS, "residual_order.svg"),
  },
];

export function regenerateAll(): void {
  for (const spec of BUNDLED) {
    writeFigure(spec);
    console.log(`wrote ${path.relative(ROOT, spec.output)}`);
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  regenerateAll();
}
