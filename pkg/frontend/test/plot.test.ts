import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { parseCsv } from "../src/csv.js";
import {
  PlotSpec,
  buildConvergence,
  buildTimeseries,
  main,
  renderSpec,
  validateSpec,
} from "../src/plot.js";
import { renderPanels } from "../src/svg.js";

let dir: string;

beforeAll(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "cipflow-plots-"));
});

afterAll(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

function write(name: string, text: string): string {
  const p = path.join(dir, name);
  fs.writeFileSync(p, text);
  return p;
}

const SLOPE2 = "h,tau,err_u_l2,err_p_l2\n" +
  "0.1,0.005,1e-2,2e-2\n0.05,0.0025,2.5e-3,5e-3\n0.025,0.00125,6.25e-4,1.25e-3\n";

describe("validateSpec", () => {
  it("rejects bad kinds, inputs and slopes", () => {
    expect(() => validateSpec({ kind: "pie" } as unknown as PlotSpec))
      .toThrow(/kind/);
    expect(() => validateSpec({ kind: "convergence", inputs: [], output: "o" }))
      .toThrow(/input/);
    expect(() =>
      validateSpec({
        kind: "convergence",
        inputs: [{ path: "x" }],
        output: "o",
        slopes: [-2],
      }),
    ).toThrow(/positive/);
  });
});

describe("buildConvergence", () => {
  it("anchors the slope guide on exact slope-2 data", () => {
    const table = parseCsv(SLOPE2);
    const spec: PlotSpec = {
      kind: "convergence",
      inputs: [{ path: "s.csv", label: "imex" }],
      output: "o.svg",
      slopes: [2],
    };
    const panel = buildConvergence(spec, [table]);
    expect(panel.series).toHaveLength(2);
    expect(panel.series[0].marker).toBe("triangle");
    expect(panel.series[1].marker).toBe("square");
    const g = panel.guides[0];
    // the guide overlays the first series: both endpoints match the data
    expect(g.y[1]).toBeCloseTo(6.25e-4, 12);
    expect(g.y[0]).toBeCloseTo(1e-2, 12);
    expect(panel.logX && panel.logY).toBe(true);
  });

  it("fails when no error columns exist", () => {
    const table = parseCsv("h,tau\n0.1,0.01\n0.05,0.005\n");
    const spec: PlotSpec = {
      kind: "convergence",
      inputs: [{ path: "s.csv" }],
      output: "o.svg",
    };
    expect(() => buildConvergence(spec, [table])).toThrow(/no error columns/);
  });
});

describe("buildTimeseries", () => {
  it("renders one panel per column with shared time axis", () => {
    const table = parseCsv("t,ke,phys_diss,art_diss\n0,1,0.1,0.2\n1,0.9,0.2,0.3\n");
    const spec: PlotSpec = {
      kind: "timeseries",
      inputs: [{ path: "d.csv", label: "kh" }],
      output: "o.svg",
    };
    const panels = buildTimeseries(spec, [table]);
    expect(panels.map((p) => p.title)).toEqual(["ke", "phys_diss", "art_diss"]);
    expect(panels[0].series[0].y).toEqual([1, 0.9]);
  });

  it("marks single-row inputs with a visible marker", () => {
    const table = parseCsv("t,ke,phys_diss,art_diss\n0.5,2,0.1,0.2\n");
    const spec: PlotSpec = {
      kind: "timeseries",
      inputs: [{ path: "d.csv" }],
      output: "o.svg",
    };
    const panels = buildTimeseries(spec, [table]);
    expect(panels[0].series[0].marker).toBe("circle");
  });

  it("keeps monotone data monotone", () => {
    const rows = Array.from({ length: 9 }, (_, i) => `${i},${1 - i * 0.1},0,0`);
    const table = parseCsv("t,ke,phys_diss,art_diss\n" + rows.join("\n"));
    const spec: PlotSpec = {
      kind: "timeseries",
      inputs: [{ path: "d.csv" }],
      output: "o.svg",
      yColumns: ["ke"],
    };
    const y = buildTimeseries(spec, [table])[0].series[0].y;
    for (let i = 1; i < y.length; i++) expect(y[i]).toBeLessThan(y[i - 1]);
  });
});

describe("renderSpec / main", () => {
  it("writes a deterministic SVG and exits 0", () => {
    const csv = write("sweep.csv", SLOPE2);
    const spec: PlotSpec = {
      kind: "convergence",
      inputs: [{ path: path.basename(csv), label: "imex" }],
      output: "fig.svg",
      slopes: [2],
    };
    const specPath = write("spec.json", JSON.stringify(spec));
    expect(main(["--spec", specPath])).toBe(0);
    const svg = fs.readFileSync(path.join(dir, "fig.svg"), "utf8");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("polygon"); // triangle markers
    expect(svg).toContain("slope 2");
    const again = renderSpec(spec, dir);
    expect(again).toBe(renderSpec(spec, dir));
  });

  it("exits 1 on a missing column and reports it", () => {
    const csv = write("bad.csv", "h,tau\n0.1,0.01\n0.05,0.005\n");
    const spec: PlotSpec = {
      kind: "convergence",
      inputs: [{ path: path.basename(csv) }],
      output: "fig2.svg",
      yColumns: ["err_u_l2"],
    };
    const specPath = write("spec2.json", JSON.stringify(spec));
    expect(main(["--spec", specPath])).toBe(1);
  });

  it("rejects an empty CSV", () => {
    write("empty.csv", "");
    const spec: PlotSpec = {
      kind: "timeseries",
      inputs: [{ path: "empty.csv" }],
      output: "fig3.svg",
    };
    const specPath = write("spec3.json", JSON.stringify(spec));
    expect(main(["--spec", specPath])).toBe(1);
  });

  it("renders a three-panel figure from KH-style data", () => {
    const rows = Array.from({ length: 20 }, (_, i) =>
      `${i * 0.5},${1 - 0.01 * i},${1e-6 * i},${1e-4 * (1 + i)}`);
    write("kh.csv", "t,ke,phys_diss,art_diss\n" + rows.join("\n"));
    const spec: PlotSpec = {
      kind: "timeseries",
      inputs: [{ path: "kh.csv", label: "imex" }],
      output: "kh.svg",
    };
    const specPath = write("spec4.json", JSON.stringify(spec));
    expect(main(["--spec", specPath])).toBe(0);
    const svg = fs.readFileSync(path.join(dir, "kh.svg"), "utf8");
    expect((svg.match(/<rect [^/]*fill="none" stroke="black"/g) ?? []).length)
      .toBe(3);
  });
});

describe("renderPanels", () => {
  it("requires at least one panel", () => {
    expect(() => renderPanels([])).toThrow(/no panels/);
  });
});
