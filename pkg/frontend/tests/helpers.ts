import { readFileSync } from "fs";
import { dirname, join } from "path";
import { fileURLToPath } from "url";

export function fixture(name: string): string {
  return join(dirname(fileURLToPath(import.meta.url)), "fixtures", name);
}

/** Parse the harness's own summary CSV: an independent stats implementation. */
export function loadSummary(
  name: string
): Map<string, { strategyMean: number; strategyStd: number; regretMean: number; regretStd: number }> {
  const lines = readFileSync(fixture(name), "utf8").trim().split("\n");
  const out = new Map();
  for (const line of lines.slice(1)) {
    const [epoch, arm, sMean, sStd, , , rMean, rStd] = line.split(",");
    out.set(`${epoch},${arm}`, {
      strategyMean: Number(sMean),
      strategyStd: Number(sStd),
      regretMean: Number(rMean),
      regretStd: Number(rStd),
    });
  }
  return out;
}
