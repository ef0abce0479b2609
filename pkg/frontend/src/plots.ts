/**
 * SVG figure builders. Every figure is computed from CSV rows alone; the
 * plotted series are exposed on the returned object so tests (and any
 * independent reader) can compare them against recomputed statistics.
 */

import { writeFileSync } from "fs";
import { scaleLinear, ScaleLinear } from "d3-scale";
import { area, line } from "d3-shape";

import { EpochRow, arms, loadEpochCsv } from "./schema.js";
import { SeriesPoint, desiredStrategy, regretSeries, strategySeries } from "./stats.js";

export type FigureKind = "strategies" | "regret";

export interface PlotSpec {
  kind: FigureKind;
  /** One CSV for strategies; one per mechanism for regret. */
  inputs: { path: string; label: string }[];
  output: string;
  /** Strategy panels to draw; defaults to every arm in the CSV. */
  arms?: number[];
}

export interface StrategyPanel {
  arm: number;
  series: SeriesPoint[];
  reference: number;
}

export interface RegretLine {
  label: string;
  series: SeriesPoint[];
}

export interface Figure {
  svg: string;
  panels?: StrategyPanel[];
  lines?: RegretLine[];
}

const PANEL_WIDTH = 320;
const PANEL_HEIGHT = 240;
const MARGIN = { top: 28, right: 16, bottom: 36, left: 56 };
const COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"];
const REFERENCE_COLOR = "#d62728";

function innerScales(
  series: SeriesPoint[][],
  yDomain: [number, number]
): { x: ScaleLinear<number, number>; y: ScaleLinear<number, number> } {
  const allEpochs = series.flat().map((p) => p.epoch);
  const x = scaleLinear()
    .domain([Math.min(...allEpochs), Math.max(...allEpochs)])
    .range([MARGIN.left, PANEL_WIDTH - MARGIN.right]);
  const y = scaleLinear()
    .domain(yDomain)
    .nice()
    .range([PANEL_HEIGHT - MARGIN.bottom, MARGIN.top]);
  return { x, y };
}

function bandPath(series: SeriesPoint[], x: ScaleLinear<number, number>, y: ScaleLinear<number, number>): string {
  const shade = area<SeriesPoint>()
    .x((p) => x(p.epoch))
    .y0((p) => y(p.mean - p.std))
    .y1((p) => y(p.mean + p.std));
  return shade(series) ?? "";
}

function meanPath(series: SeriesPoint[], x: ScaleLinear<number, number>, y: ScaleLinear<number, number>): string {
  const trace = line<SeriesPoint>()
    .x((p) => x(p.epoch))
    .y((p) => y(p.mean));
  return trace(series) ?? "";
}

function axes(x: ScaleLinear<number, number>, y: ScaleLinear<number, number>, yLabel: string): string {
  const parts: string[] = [];
  const x0 = MARGIN.left;
  const x1 = PANEL_WIDTH - MARGIN.right;
  const y0 = PANEL_HEIGHT - MARGIN.bottom;
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="#333"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${MARGIN.top}" stroke="#333"/>`);
  for (const tick of x.ticks(5)) {
    const px = x(tick);
    parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 4}" stroke="#333"/>`);
    parts.push(
      `<text x="${px}" y="${y0 + 16}" font-size="10" text-anchor="middle">${tick}</text>`
    );
  }
  for (const tick of y.ticks(5)) {
    const py = y(tick);
    parts.push(`<line x1="${x0 - 4}" y1="${py}" x2="${x0}" y2="${py}" stroke="#333"/>`);
    parts.push(
      `<text x="${x0 - 7}" y="${py + 3}" font-size="10" text-anchor="end">${tick}</text>`
    );
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${PANEL_HEIGHT - 6}" font-size="11" text-anchor="middle">epoch</text>`
  );
  parts.push(
    `<text x="14" y="${(y0 + MARGIN.top) / 2}" font-size="11" text-anchor="middle" ` +
      `transform="rotate(-90 14 ${(y0 + MARGIN.top) / 2})">${yLabel}</text>`
  );
  return parts.join("\n");
}

function strategyPanelSvg(panel: StrategyPanel, offsetX: number): string {
  const { x, y } = innerScales([panel.series], [0, 1]);
  const refY = y(panel.reference);
  return [
    `<g transform="translate(${offsetX},0)">`,
    `<text x="${PANEL_WIDTH / 2}" y="16" font-size="12" text-anchor="middle">arm ${panel.arm}</text>`,
    axes(x, y, "strategy"),
    `<path class="band" d="${bandPath(panel.series, x, y)}" fill="${COLORS[0]}" fill-opacity="0.2"/>`,
    `<path class="mean" d="${meanPath(panel.series, x, y)}" fill="none" stroke="${COLORS[0]}" stroke-width="1.5"/>`,
    `<line class="reference" data-value="${panel.reference}" x1="${MARGIN.left}" y1="${refY}" ` +
      `x2="${PANEL_WIDTH - MARGIN.right}" y2="${refY}" stroke="${REFERENCE_COLOR}" stroke-dasharray="4 3"/>`,
    `</g>`,
  ].join("\n");
}

/** Per-arm strategy trajectories with std shading and the s* reference line. */
export function buildStrategyFigure(rows: EpochRow[], armSubset?: number[]): Figure {
  const available = arms(rows);
  const selected = armSubset ?? available;
  for (const arm of selected) {
    if (!available.includes(arm)) {
      throw new Error(`arm ${arm} not present in CSV`);
    }
  }
  const panels: StrategyPanel[] = selected.map((arm) => ({
    arm,
    series: strategySeries(rows, arm),
    reference: desiredStrategy(rows, arm),
  }));
  const width = PANEL_WIDTH * panels.length;
  const body = panels.map((panel, i) => strategyPanelSvg(panel, i * PANEL_WIDTH)).join("\n");
  const svg =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${PANEL_HEIGHT}" ` +
    `viewBox="0 0 ${width} ${PANEL_HEIGHT}" font-family="sans-serif">\n${body}\n</svg>\n`;
  return { svg, panels };
}

/** Mean cumulative regret per epoch, one line per labelled input. */
export function buildRegretFigure(inputs: { label: string; rows: EpochRow[] }[]): Figure {
  if (inputs.length === 0) {
    throw new Error("regret figure needs at least one input CSV");
  }
  const lines: RegretLine[] = inputs.map(({ label, rows }) => ({
    label,
    series: regretSeries(rows),
  }));
  const allPoints = lines.flatMap((l) => l.series);
  const yMax = Math.max(...allPoints.map((p) => p.mean + p.std));
  const { x, y } = innerScales(lines.map((l) => l.series), [0, yMax]);
  const body = lines
    .map((l, i) => {
      const color = COLORS[i % COLORS.length]!;
      return [
        `<g class="series" data-label="${l.label}">`,
        `<path class="band" d="${bandPath(l.series, x, y)}" fill="${color}" fill-opacity="0.2"/>`,
        `<path class="mean" d="${meanPath(l.series, x, y)}" fill="none" stroke="${color}" stroke-width="1.5"/>`,
        `<text x="${PANEL_WIDTH - MARGIN.right - 4}" y="${MARGIN.top + 14 * (i + 1)}" ` +
          `font-size="11" text-anchor="end" fill="${color}">${l.label}</text>`,
        `</g>`,
      ].join("\n");
    })
    .join("\n");
  const svg =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${PANEL_WIDTH}" height="${PANEL_HEIGHT}" ` +
    `viewBox="0 0 ${PANEL_WIDTH} ${PANEL_HEIGHT}" font-family="sans-serif">\n` +
    `${axes(x, y, "cumulative regret")}\n${body}\n</svg>\n`;
  return { svg, lines };
}

/** Render the figure described by the spec and write it to spec.output. */
export function render(spec: PlotSpec): Figure {
  let figure: Figure;
  if (spec.kind === "strategies") {
    if (spec.inputs.length !== 1) {
      throw new Error("strategies figure takes exactly one input CSV");
    }
    figure = buildStrategyFigure(loadEpochCsv(spec.inputs[0]!.path), spec.arms);
  } else if (spec.kind === "regret") {
    figure = buildRegretFigure(
      spec.inputs.map(({ path, label }) => ({ label, rows: loadEpochCsv(path) }))
    );
  } else {
    throw new Error(`unknown figure kind ${JSON.stringify(spec.kind)}`);
  }
  writeFileSync(spec.output, figure.svg);
  return figure;
}
