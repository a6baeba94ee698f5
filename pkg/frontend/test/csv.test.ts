import { describe, expect, it } from "vitest";

import { column, parseCsv } from "../src/csv.js";

describe("parseCsv", () => {
  it("parses a table with comments and blank lines", () => {
    const t = parseCsv("h,err\n# a comment\n0.1,0.01\n\n0.05,0.0025\n# tail\n");
    expect(t.columns).toEqual(["h", "err"]);
    expect(t.rows).toEqual([
      [0.1, 0.01],
      [0.05, 0.0025],
    ]);
  });

  it("rejects empty input", () => {
    expect(() => parseCsv("")).toThrow(/empty CSV/);
    expect(() => parseCsv("h,err\n# only comments\n")).toThrow(/no data rows/);
  });

  it("rejects ragged or non-numeric rows", () => {
    expect(() => parseCsv("a,b\n1\n")).toThrow(/row 2/);
    expect(() => parseCsv("a,b\n1,x\n")).toThrow(/non-numeric/);
  });

  it("reports available columns on a miss", () => {
    const t = parseCsv("t,ke\n0,1\n");
    expect(() => column(t, "energy")).toThrow(/available: t, ke/);
    expect(column(t, "ke")).toEqual([1]);
  });

  it("round-trips 17-digit floats", () => {
    const t = parseCsv("t,v\n0.10000000000000001,0.33333333333333331\n");
    expect(t.rows[0][0]).toBe(0.1);
    expect(t.rows[0][1]).toBeCloseTo(1 / 3, 16);
  });
});
