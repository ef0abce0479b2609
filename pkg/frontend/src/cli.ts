#!/usr/bin/env node
/**
 * Figure renderer for click-bandit experiment CSVs.
 *
 * Examples:
 *   clickbandit-plots --kind strategies --input fig2-ucbs.csv --out strategies.svg
 *   clickbandit-plots --kind regret --input ucbs=fig2-ucbs.csv --input ucb=fig2-ucb.csv --out regret.svg
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { FigureKind, PlotSpec, render } from "./plots.js";

function parseInput(raw: string): { path: string; label: string } {
  const eq = raw.indexOf("=");
  if (eq < 0) {
    return { path: raw, label: raw.replace(/\.csv$/, "") };
  }
  return { label: raw.slice(0, eq), path: raw.slice(eq + 1) };
}

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .option("kind", {
      choices: ["strategies", "regret"] as const,
      demandOption: true,
      describe: "figure kind",
    })
    .option("input", {
      type: "string",
      array: true,
      demandOption: true,
      describe: "epoch CSV, optionally label=path",
    })
    .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
    .option("arms", { type: "string", describe: "comma-separated arm subset (strategies only)" })
    .strict()
    .parse();

  const spec: PlotSpec = {
    kind: args.kind as FigureKind,
    inputs: args.input.map(parseInput),
    output: args.out,
    arms: args.arms === undefined ? undefined : args.arms.split(",").map(Number),
  };
  try {
    render(spec);
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  console.error(`wrote ${spec.output}`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
