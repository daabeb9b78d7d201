import Papa from "papaparse";

import { ValidationError } from "./errors.js";

export const PATTERN_CSV_HEADER =
  "angle_deg,input,subcarrier,gain_db,directivity_db,U_normalized";

export interface PatternRow {
  angleDeg: number;
  input: number;
  subcarrier: number;
  gainDb: number;
  directivityDb: number;
  uNormalized: number;
}

export interface PatternGroup {
  input: number;
  subcarrier: number;
  anglesDeg: number[];
  gainDb: number[];
}

function numberField(raw: string, name: string, line: number): number {
  const value = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(value)) {
    throw new ValidationError(`line ${line}: ${name} is not a finite number: ${JSON.stringify(raw)}`);
  }
  return value;
}

function indexField(raw: string, name: string, line: number): number {
  const value = numberField(raw, name, line);
  if (!Number.isInteger(value) || value < 1) {
    throw new ValidationError(`line ${line}: ${name} must be a positive integer: ${JSON.stringify(raw)}`);
  }
  return value;
}

export function parsePatternCsv(text: string): PatternRow[] {
  const firstLine = text.split(/\r?\n/, 1)[0] ?? "";
  if (firstLine !== PATTERN_CSV_HEADER) {
    throw new ValidationError(
      `line 1: header must be exactly "${PATTERN_CSV_HEADER}", got "${firstLine}"`);
  }

  const parsed = Papa.parse<string[]>(text, { delimiter: "," });
  for (const err of parsed.errors) {
    const line = (err.row ?? 0) + 1;
    throw new ValidationError(`line ${line}: ${err.message}`);
  }
  const data = parsed.data;
  while (data.length && data[data.length - 1].every((cell) => cell === "")) {
    data.pop();
  }

  const rows: PatternRow[] = [];
  for (let i = 1; i < data.length; i += 1) {
    const line = i + 1;
    const cells = data[i];
    if (cells.length !== 6) {
      throw new ValidationError(
        `line ${line}: expected 6 comma-separated fields, got ${cells.length}`);
    }
    const row: PatternRow = {
      angleDeg: numberField(cells[0], "angle_deg", line),
      input: indexField(cells[1], "input", line),
      subcarrier: indexField(cells[2], "subcarrier", line),
      gainDb: numberField(cells[3], "gain_db", line),
      directivityDb: numberField(cells[4], "directivity_db", line),
      uNormalized: numberField(cells[5], "U_normalized", line),
    };
    if (row.uNormalized < 0) {
      throw new ValidationError(`line ${line}: U_normalized must be nonnegative`);
    }
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new ValidationError("no data rows after header");
  }
  return rows;
}

/** Split rows into per-(input, subcarrier) traces, sorted by that pair. */
export function groupPatterns(rows: PatternRow[]): PatternGroup[] {
  const byKey = new Map<string, PatternGroup>();
  for (const row of rows) {
    const key = `${row.input}:${row.subcarrier}`;
    let group = byKey.get(key);
    if (!group) {
      group = { input: row.input, subcarrier: row.subcarrier, anglesDeg: [], gainDb: [] };
      byKey.set(key, group);
    }
    group.anglesDeg.push(row.angleDeg);
    group.gainDb.push(row.gainDb);
  }
  return [...byKey.values()].sort(
    (a, b) => a.input - b.input || a.subcarrier - b.subcarrier);
}
