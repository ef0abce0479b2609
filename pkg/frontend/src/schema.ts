/**
 * EpochRow CSV schema: the external interface between the simulation
 * harness and this package. One row per (run, epoch, arm).
 */

import { readFileSync } from "fs";
import Papa from "papaparse";

export interface EpochRow {
  run: number;
  epoch: number;
  arm: number;
  strategy: number;
  desired_strategy: number;
  cum_regret: number;
  clicks: number;
  eliminated: number;
  elimination_round: number;
}

export const EPOCH_COLUMNS: ReadonlyArray<keyof EpochRow> = [
  "run",
  "epoch",
  "arm",
  "strategy",
  "desired_strategy",
  "cum_regret",
  "clicks",
  "eliminated",
  "elimination_round",
];

export class SchemaError extends Error {}

/** Parse CSV text into epoch rows, rejecting schema violations. */
export function parseEpochCsv(text: string, source = "<string>"): EpochRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new SchemaError(`${source}: ${first.message} (row ${first.row})`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const column of EPOCH_COLUMNS) {
    if (!fields.includes(column)) {
      throw new SchemaError(`${source}: missing column ${JSON.stringify(column)}`);
    }
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(`${source}: no data rows`);
  }
  return parsed.data.map((raw, i) => {
    const row = {} as Record<keyof EpochRow, number>;
    for (const column of EPOCH_COLUMNS) {
      const value = Number(raw[column]);
      if (!Number.isFinite(value)) {
        throw new SchemaError(
          `${source}: row ${i + 1}: non-numeric ${column}=${JSON.stringify(raw[column])}`
        );
      }
      row[column] = value;
    }
    return row as EpochRow;
  });
}

export function loadEpochCsv(path: string): EpochRow[] {
  return parseEpochCsv(readFileSync(path, "utf8"), path);
}

export function arms(rows: EpochRow[]): number[] {
  return [...new Set(rows.map((r) => r.arm))].sort((a, b) => a - b);
}

export function epochs(rows: EpochRow[]): number[] {
  return [...new Set(rows.map((r) => r.epoch))].sort((a, b) => a - b);
}
