/**
 * Command line: plot <kind> <csv...> -o <img>
 *
 * Exit codes follow the simulator's convention: 0 on success, 2 for bad
 * input (unknown kind, missing arguments, schema mismatch, empty table).
 * No image file is written unless the whole render succeeded.
 */

import { pathToFileURL } from "url";

import { FIGURE_KINDS, FigureKind, writeFigure } from "./figures.js";
import { SchemaError } from "./schema.js";

export const EXIT_OK = 0;
export const EXIT_INPUT = 2;

const USAGE = `usage: plot <kind> <csv...> -o <img>

kinds:
  norm-drift       l2-norm drift against time (one diagnostics CSV)
  field-energy     field energy against time (one diagnostics CSV)
  picard-distance  iterate distance per iteration, log scale (one convergence CSV)
  residual-order   max residual against dt, log-log (two or more diagnostics CSVs)
`;

interface Parsed {
  kind: FigureKind;
  inputs: string[];
  output: string;
}

function parseArgs(argv: string[]): Parsed {
  if (argv.length === 0 || argv[0] === "-h" || argv[0] === "--help") {
    throw new SchemaError(USAGE);
  }
  const [kind, ...rest] = argv;
  if (!(FIGURE_KINDS as readonly string[]).includes(kind)) {
    throw new SchemaError(`unknown figure kind '${kind}'\n\n${USAGE}`);
  }
  const inputs: string[] = [];
  let output: string | undefined;
  for (let i = 0; i < rest.length; i++) {
    if (rest[i] === "-o" || rest[i] === "--output") {
      if (output !== undefined) throw new SchemaError("-o given twice");
      output = rest[++i];
      if (output === undefined) throw new SchemaError("-o needs a path");
    } else if (rest[i].startsWith("-")) {
      throw new SchemaError(`unknown option '${rest[i]}'`);
    } else {
      inputs.push(rest[i]);
    }
  }
  if (inputs.length === 0) throw new SchemaError("no input CSV given");
  if (output === undefined) throw new SchemaError("no output image given (-o <img>)");
  return { kind: kind as FigureKind, inputs, output };
}

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    writeFigure(spec);
    console.log(`wrote ${spec.output}`);
    return EXIT_OK;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof Error) {
      console.error(err.message);
      return EXIT_INPUT;
    }
    throw err;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
