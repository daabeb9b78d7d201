import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { parsePatternCsv } from "./csv.js";
import { ValidationError } from "./errors.js";
import { renderPolarSvg, type PlotMode } from "./polar.js";
import { parseReport } from "./schema.js";
import { renderMarkdownTable } from "./table.js";

// Exit codes shared by both executables.
export const EXIT_OK = 0;
export const EXIT_VALIDATION = 1;
export const EXIT_IO = 2;

type Sink = (line: string) => void;

const defaultSink: Sink = (line) => process.stderr.write(line + "\n");

const PLOT_USAGE =
  "usage: plot-patterns <pattern.csv> -o <out.svg> " +
  "[--mode per-input|per-subcarrier|grid] [--floor-db <negative dB>]";
const TABLE_USAGE = "usage: render-table <report.json> -o <out.md>";

function readInput(path: string, tool: string, stderr: Sink): string | null {
  try {
    return readFileSync(path, "utf8");
  } catch (err) {
    stderr(`${tool}: cannot read ${path}: ${(err as Error).message}`);
    return null;
  }
}

function writeOutput(path: string, content: string, tool: string, stderr: Sink): boolean {
  try {
    writeFileSync(path, content);
    return true;
  } catch (err) {
    stderr(`${tool}: cannot write ${path}: ${(err as Error).message}`);
    return false;
  }
}

export function runPlot(argv: string[], stderr: Sink = defaultSink): number {
  let positionals: string[];
  let values: { out?: string; mode?: string; "floor-db"?: string };
  try {
    ({ positionals, values } = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        out: { type: "string", short: "o" },
        mode: { type: "string", default: "per-input" },
        "floor-db": { type: "string", default: "-30" },
      },
    }));
  } catch (err) {
    stderr(`plot-patterns: ${(err as Error).message}`);
    stderr(PLOT_USAGE);
    return EXIT_VALIDATION;
  }
  if (positionals.length !== 1 || !values.out) {
    stderr(PLOT_USAGE);
    return EXIT_VALIDATION;
  }
  const mode = values.mode as PlotMode;
  if (!["per-input", "per-subcarrier", "grid"].includes(mode)) {
    stderr(`plot-patterns: unknown mode ${JSON.stringify(values.mode)}`);
    return EXIT_VALIDATION;
  }
  const floorDb = Number(values["floor-db"]);
  if (!Number.isFinite(floorDb) || floorDb >= 0) {
    stderr(`plot-patterns: --floor-db must be a negative number, got ${values["floor-db"]}`);
    return EXIT_VALIDATION;
  }

  const text = readInput(positionals[0], "plot-patterns", stderr);
  if (text === null) return EXIT_IO;
  let svg: string;
  try {
    svg = renderPolarSvg(parsePatternCsv(text), { mode, floorDb });
  } catch (err) {
    if (err instanceof ValidationError) {
      stderr(`plot-patterns: ${positionals[0]}: ${err.message}`);
      return EXIT_VALIDATION;
    }
    throw err;
  }
  return writeOutput(values.out, svg, "plot-patterns", stderr) ? EXIT_OK : EXIT_IO;
}

export function runTable(argv: string[], stderr: Sink = defaultSink): number {
  let positionals: string[];
  let values: { out?: string };
  try {
    ({ positionals, values } = parseArgs({
      args: argv,
      allowPositionals: true,
      options: { out: { type: "string", short: "o" } },
    }));
  } catch (err) {
    stderr(`render-table: ${(err as Error).message}`);
    stderr(TABLE_USAGE);
    return EXIT_VALIDATION;
  }
  if (positionals.length !== 1 || !values.out) {
    stderr(TABLE_USAGE);
    return EXIT_VALIDATION;
  }

  const text = readInput(positionals[0], "render-table", stderr);
  if (text === null) return EXIT_IO;
  let table: string;
  try {
    table = renderMarkdownTable(parseReport(text));
  } catch (err) {
    if (err instanceof ValidationError) {
      stderr(`render-table: ${positionals[0]}: ${err.message}`);
      return EXIT_VALIDATION;
    }
    throw err;
  }
  return writeOutput(values.out, table, "render-table", stderr) ? EXIT_OK : EXIT_IO;
}
