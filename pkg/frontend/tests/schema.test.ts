import { describe, expect, it } from "vitest";

import { SchemaError, arms, epochs, loadEpochCsv, parseEpochCsv } from "../src/schema.js";
import { fixture } from "./helpers.js";

const HEADER =
  "run,epoch,arm,strategy,desired_strategy,cum_regret,clicks,eliminated,elimination_round";

describe("parseEpochCsv", () => {
  it("parses a minimal well-formed CSV", () => {
    const rows = parseEpochCsv(`${HEADER}\n0,0,0,1,0.825,12.5,30,0,-1\n`);
    expect(rows).toHaveLength(1);
    expect(rows[0]).toEqual({
      run: 0,
      epoch: 0,
      arm: 0,
      strategy: 1,
      desired_strategy: 0.825,
      cum_regret: 12.5,
      clicks: 30,
      eliminated: 0,
      elimination_round: -1,
    });
  });

  it("rejects a missing column", () => {
    const header = HEADER.replace(",desired_strategy", "");
    expect(() => parseEpochCsv(`${header}\n0,0,0,1,12.5,30,0,-1\n`)).toThrow(SchemaError);
    expect(() => parseEpochCsv(`${header}\n0,0,0,1,12.5,30,0,-1\n`)).toThrow(
      /desired_strategy/
    );
  });

  it("rejects non-numeric cells with row context", () => {
    expect(() => parseEpochCsv(`${HEADER}\n0,0,0,high,0.825,12.5,30,0,-1\n`)).toThrow(
      /row 1.*strategy/
    );
  });

  it("rejects an empty body", () => {
    expect(() => parseEpochCsv(`${HEADER}\n`)).toThrow(/no data rows/);
  });

  it("loads the generated fixtures", () => {
    const rows = loadEpochCsv(fixture("fig2-ucbs.csv"));
    // runs x epochs x arms from the fixture protocol
    expect(rows).toHaveLength(3 * 5 * 4);
    expect(arms(rows)).toEqual([0, 1, 2, 3]);
    expect(epochs(rows)).toEqual([0, 1, 2, 3, 4]);
  });
});
