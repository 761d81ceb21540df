/**
 * CSV schema contract shared with the simulator.
 *
 * Every table starts with a version comment (`# msfield-...-v1`); a file
 * whose first line does not match is refused with an explicit version
 * error rather than being guessed at.
 */

export const DIAGNOSTICS_SCHEMA = "msfield-diagnostics-v1";
export const CONVERGENCE_SCHEMA = "msfield-convergence-v1";

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

/** First-line version check. Throws with both the found and wanted tags. */
export function checkSchemaLine(first: string | undefined, expected: string, source: string): void {
  const found = (first ?? "").trim();
  if (found !== `# ${expected}`) {
    throw new SchemaError(
      `${source}: schema version mismatch: expected '# ${expected}', found '${found || "(empty file)"}'`
    );
  }
}

/** Column-header check for the line after the version comment. */
export function checkHeaderLine(line: string | undefined, columns: string[], source: string): void {
  const found = (line ?? "").trim();
  const wanted = columns.join(",");
  if (found !== wanted) {
    throw new SchemaError(`${source}: expected columns '${wanted}', found '${found || "(missing)"}'`);
  }
}
