import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import path from "path";
import { fileURLToPath } from "url";
import { describe, expect, it, vi } from "vitest";

import { EXIT_INPUT, EXIT_OK, main } from "../src/cli.js";
import { BUNDLED, regenerateAll } from "../src/regenerate.js";
import { plotDiagnostics } from "../src/figures.js";

const samplePath = (name: string) => fileURLToPath(new URL(`../sample_data/${name}`, import.meta.url));

function quiet<T>(fn: () => T): T {
  const log = vi.spyOn(console, "log").mockImplementation(() => {});
  const err = vi.spyOn(console, "error").mockImplementation(() => {});
  try {
    return fn();
  } finally {
    log.mockRestore();
    err.mockRestore();
  }
}

describe("plot command", () => {
  it("writes a figure and exits 0", () => {
    const out = path.join(mkdtempSync(path.join(tmpdir(), "plots-")), "norm.svg");
    const code = quiet(() => main(["norm-drift", samplePath("free_particle_diagnostics.csv"), "-o", out]));
    expect(code).toBe(EXIT_OK);
    expect(readFileSync(out, "utf-8")).toContain("<svg");
  });

  it("accepts several tables for the order figure", () => {
    const out = path.join(mkdtempSync(path.join(tmpdir(), "plots-")), "order.svg");
    const code = quiet(() =>
      main([
        "residual-order",
        samplePath("order_nodes10_diagnostics.csv"),
        samplePath("order_nodes20_diagnostics.csv"),
        samplePath("order_nodes40_diagnostics.csv"),
        "-o",
        out,
      ])
    );
    expect(code).toBe(EXIT_OK);
    expect(existsSync(out)).toBe(true);
  });

  it("refuses an empty table and writes nothing", () => {
    const dir = mkdtempSync(path.join(tmpdir(), "plots-"));
    const empty = path.join(dir, "empty.csv");
    writeFileSync(empty, "");
    const out = path.join(dir, "never.svg");
    const code = quiet(() => main(["norm-drift", empty, "-o", out]));
    expect(code).toBe(EXIT_INPUT);
    expect(existsSync(out)).toBe(false);
  });

  it("refuses the wrong table schema and writes nothing", () => {
    const out = path.join(mkdtempSync(path.join(tmpdir(), "plots-")), "never.svg");
    const code = quiet(() => main(["picard-distance", samplePath("free_particle_diagnostics.csv"), "-o", out]));
    expect(code).toBe(EXIT_INPUT);
    expect(existsSync(out)).toBe(false);
  });

  it("rejects unknown kinds, missing inputs, and missing -o", () => {
    expect(quiet(() => main(["spectrogram", "x.csv", "-o", "y.svg"]))).toBe(EXIT_INPUT);
    expect(quiet(() => main(["norm-drift", "-o", "y.svg"]))).toBe(EXIT_INPUT);
    expect(quiet(() => main(["norm-drift", samplePath("free_particle_diagnostics.csv")]))).toBe(EXIT_INPUT);
    expect(quiet(() => main([]))).toBe(EXIT_INPUT);
  });

  it("reports a missing file as an input error", () => {
    expect(quiet(() => main(["norm-drift", "no-such-file.csv", "-o", "y.svg"]))).toBe(EXIT_INPUT);
  });
});

describe("bundled figures", () => {
  it("regenerate from the shipped tables", () => {
    quiet(() => regenerateAll());
    for (const spec of BUNDLED) {
      expect(existsSync(spec.output)).toBe(true);
      expect(readFileSync(spec.output, "utf-8")).toContain("</svg>");
    }
  });

  it("cover every figure kind once", () => {
    expect(new Set(BUNDLED.map((s) => s.kind)).size).toBe(4);
  });
});

describe("plotDiagnostics", () => {
  it("emits one image per applicable kind", () => {
    const dir = mkdtempSync(path.join(tmpdir(), "plots-"));
    const outputs = plotDiagnostics(samplePath("small_data_diagnostics.csv"), dir);
    expect(outputs.length).toBe(2);
    for (const out of outputs) expect(existsSync(out)).toBe(true);
    expect(outputs.some((o) => o.includes("norm_drift"))).toBe(true);
    expect(outputs.some((o) => o.includes("field_energy"))).toBe(true);
  });
});
