/**
 * Per-epoch statistics across runs. Stds are population stds (ddof=0),
 * matching the harness's summary convention so figures and summary CSVs
 * agree exactly.
 */

import { EpochRow, arms, epochs } from "./schema.js";

export interface SeriesPoint {
  epoch: number;
  mean: number;
  std: number;
}

export function mean(values: number[]): number {
  if (values.length === 0) {
    throw new Error("mean of empty sample");
  }
  return values.reduce((a, b) => a + b, 0) / values.length;
}

export function populationStd(values: number[]): number {
  const m = mean(values);
  return Math.sqrt(mean(values.map((v) => (v - m) ** 2)));
}

function seriesOver(
  rows: EpochRow[],
  pick: (r: EpochRow) => number,
  filter: (r: EpochRow) => boolean
): SeriesPoint[] {
  return epochs(rows).map((epoch) => {
    const values = rows.filter((r) => r.epoch === epoch && filter(r)).map(pick);
    return { epoch, mean: mean(values), std: populationStd(values) };
  });
}

/** Mean +/- std of one arm's strategy per epoch, across runs. */
export function strategySeries(rows: EpochRow[], arm: number): SeriesPoint[] {
  if (!arms(rows).includes(arm)) {
    throw new Error(`arm ${arm} not present in CSV`);
  }
  return seriesOver(rows, (r) => r.strategy, (r) => r.arm === arm);
}

/**
 * Mean +/- std of cumulative regret per epoch. Regret is an episode-level
 * quantity repeated on every arm row, so only arm 0 rows are read.
 */
export function regretSeries(rows: EpochRow[]): SeriesPoint[] {
  return seriesOver(rows, (r) => r.cum_regret, (r) => r.arm === arms(rows)[0]);
}

/** The desired-strategy reference level for the arm (constant per arm). */
export function desiredStrategy(rows: EpochRow[], arm: number): number {
  const values = [...new Set(rows.filter((r) => r.arm === arm).map((r) => r.desired_strategy))];
  if (values.length === 0) {
    throw new Error(`arm ${arm} not present in CSV`);
  }
  if (values.length > 1) {
    throw new Error(`arm ${arm} has non-constant desired_strategy column`);
  }
  return values[0]!;
}
