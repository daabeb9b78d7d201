import { curveLinearClosed, lineRadial } from "d3-shape";

import { groupPatterns, type PatternGroup, type PatternRow } from "./csv.js";
import { ValidationError } from "./errors.js";

export type PlotMode = "per-input" | "per-subcarrier" | "grid";

export interface PolarPlotOptions {
  mode?: PlotMode;
  /** Radial floor in dB relative to the axes peak; must be negative. */
  floorDb?: number;
}

const PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function traceLabel(group: PatternGroup, mode: PlotMode,
                    inputs: number, subcarriers: number): string {
  if (mode === "per-subcarrier") {
    const base = `sc ${group.subcarrier}`;
    return inputs > 1 ? `input ${group.input}, ${base}` : base;
  }
  const base = `input ${group.input}`;
  return subcarriers > 1 ? `${base}, sc ${group.subcarrier}` : base;
}

function polarAxes(groups: PatternGroup[], labels: string[], radius: number,
                   floorDb: number, colorOffset = 0): string {
  const peak = Math.max(...groups.map((g) => Math.max(...g.gainDb)));
  const lo = peak + floorDb;
  const toRadius = (db: number) =>
    radius * (Math.min(Math.max(db, lo), peak) - lo) / -floorDb;
  const line = lineRadial<[number, number]>()
    .angle((d) => Math.PI / 2 - (d[0] * Math.PI) / 180)
    .radius((d) => toRadius(d[1]))
    .curve(curveLinearClosed);

  const parts: string[] = ['<g class="polar-axes">'];
  const ringStep = 10;
  for (let db = 0; db >= floorDb; db -= ringStep) {
    const r = toRadius(peak + db);
    if (r <= 0) continue;
    parts.push(`<circle r="${r.toFixed(2)}" fill="none" stroke="#ccc" stroke-width="0.6"/>`);
    parts.push(`<text x="2" y="${(-r + 9).toFixed(2)}" font-size="8" fill="#888">` +
               `${(peak + db).toFixed(0)} dB</text>`);
  }
  for (let deg = 0; deg < 360; deg += 30) {
    const a = Math.PI / 2 - (deg * Math.PI) / 180;
    const x = radius * Math.sin(a);
    const y = -radius * Math.cos(a);
    parts.push(`<line x1="0" y1="0" x2="${x.toFixed(2)}" y2="${y.toFixed(2)}" ` +
               'stroke="#eee" stroke-width="0.6"/>');
    if (deg % 90 === 0) {
      const lx = 1.1 * x;
      const ly = 1.1 * y;
      parts.push(`<text x="${lx.toFixed(2)}" y="${ly.toFixed(2)}" font-size="9" ` +
                 'fill="#555" text-anchor="middle" dominant-baseline="middle">' +
                 `${deg}&#176;</text>`);
    }
  }
  groups.forEach((group, idx) => {
    const points = group.anglesDeg.map(
      (a, i) => [a, group.gainDb[i]] as [number, number]);
    const d = line(points) ?? "";
    const color = PALETTE[(idx + colorOffset) % PALETTE.length];
    parts.push(`<path class="trace" d="${d}" fill="none" stroke="${color}" ` +
               `stroke-width="1.5"><title>${esc(labels[idx])}</title></path>`);
  });
  parts.push("</g>");
  return parts.join("\n");
}

/**
 * Render grouped gain traces as a polar SVG document.
 *
 * Single-axes modes overlay one labeled trace per (input, subcarrier)
 * group; grid mode gives each group its own subplot. Radii are clipped at
 * floorDb below the axes peak so deep nulls stay on the chart.
 */
export function renderPolarSvg(rows: PatternRow[], options: PolarPlotOptions = {}): string {
  const mode = options.mode ?? "per-input";
  const floorDb = options.floorDb ?? -30;
  if (!(floorDb < 0)) {
    throw new ValidationError(`floor must be negative dB, got ${floorDb}`);
  }
  const groups = groupPatterns(rows);
  const inputs = new Set(groups.map((g) => g.input)).size;
  const subcarriers = new Set(groups.map((g) => g.subcarrier)).size;
  const labels = groups.map((g) => traceLabel(g, mode, inputs, subcarriers));

  if (mode === "grid") {
    const cols = Math.ceil(Math.sqrt(groups.length));
    const gridRows = Math.ceil(groups.length / cols);
    const cell = 250;
    const radius = 88;
    const width = cols * cell;
    const height = gridRows * cell;
    const parts = [`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
                   `height="${height}" viewBox="0 0 ${width} ${height}">`];
    groups.forEach((group, idx) => {
      const cx = (idx % cols) * cell + cell / 2;
      const cy = Math.floor(idx / cols) * cell + cell / 2 + 10;
      parts.push(`<g transform="translate(${cx},${cy})">`);
      parts.push(`<text x="0" y="${-cell / 2 + 6}" font-size="11" ` +
                 'text-anchor="middle" font-weight="bold">' +
                 `input ${group.input}, sc ${group.subcarrier}</text>`);
      parts.push(polarAxes([group], [labels[idx]], radius, floorDb, idx));
      parts.push("</g>");
    });
    parts.push("</svg>");
    return parts.join("\n") + "\n";
  }

  const size = 460;
  const radius = 165;
  const legendHeight = 14 * groups.length;
  const height = size + legendHeight;
  const parts = [`<svg xmlns="http://www.w3.org/2000/svg" width="${size}" ` +
                 `height="${height}" viewBox="0 0 ${size} ${height}">`];
  parts.push(`<g transform="translate(${size / 2},${size / 2})">`);
  parts.push(polarAxes(groups, labels, radius, floorDb));
  parts.push("</g>");
  labels.forEach((label, idx) => {
    const y = size + 4 + 14 * idx;
    const color = PALETTE[idx % PALETTE.length];
    parts.push(`<line x1="8" y1="${y}" x2="28" y2="${y}" stroke="${color}" ` +
               'stroke-width="1.5"/>');
    parts.push(`<text class="legend" x="34" y="${y + 3}" font-size="10">` +
               `${esc(label)}</text>`);
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
