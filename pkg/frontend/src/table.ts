import type { Report, ReportEntry } from "./schema.js";

function label(entry: ReportEntry, report: Report): string {
  if (report.k_count === 1) return `input ${entry.input}`;
  if (report.na === 1) return `sc ${entry.subcarrier}`;
  return `input ${entry.input}, sc ${entry.subcarrier}`;
}

/**
 * Markdown summary with one row per (input, subcarrier) entry.
 *
 * Row labels collapse to the varying dimension; an empty report yields a
 * header-only table.
 */
export function renderMarkdownTable(report: Report): string {
  const lines = [
    "| configuration | gain (dB) | eta1 | eta2 |",
    "| --- | ---: | ---: | ---: |",
  ];
  for (const entry of report.entries) {
    lines.push(`| ${label(entry, report)} | ${entry.peak_gain_db.toFixed(2)} ` +
               `| ${entry.eta1.toFixed(3)} | ${entry.eta2.toFixed(3)} |`);
  }
  return lines.join("\n") + "\n";
}
