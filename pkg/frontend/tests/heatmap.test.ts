import { describe, expect, it } from "vitest";

import { cellIntensity, rampColor, renderHeatmap } from "../src/heatmap.js";
import type { AlignmentMatrix } from "../src/types.js";

const diagonal: AlignmentMatrix = {
  rows: ["a", "b"],
  cols: ["t1", "t2"],
  counts: [
    [10, 0],
    [0, 10],
  ],
};

describe("cell intensity", () => {
  it("is min-max normalized", () => {
    expect(cellIntensity(diagonal)).toEqual([
      [1, 0],
      [0, 1],
    ]);
  });

  it("renders a flat matrix mid-scale", () => {
    const flat: AlignmentMatrix = {
      rows: ["a"],
      cols: ["t1", "t2"],
      counts: [[3, 3]],
    };
    expect(cellIntensity(flat)).toEqual([[0.5, 0.5]]);
  });
});

describe("heatmap rendering", () => {
  it("renders [[10,0],[0,10]] with two maximal-intensity cells whose hover values equal the counts", () => {
    const html = renderHeatmap(diagonal);
    const maximal = html.match(/data-intensity="1\.0000"/g) ?? [];
    expect(maximal).toHaveLength(2);
    expect(html.match(/title="10">10</g)).toHaveLength(2);
    expect(html.match(/title="0">0</g)).toHaveLength(2);
    // Maximal cells use the bright end of the ramp.
    expect(html.match(/background:rgb\(253,231,37\)/g)).toHaveLength(2);
  });

  it("keeps cell order matching matrix row/col order", () => {
    const html = renderHeatmap(diagonal);
    const counts = [...html.matchAll(/title="(\d+)"/g)].map((m) => Number(m[1]));
    expect(counts).toEqual([10, 0, 0, 10]);
    expect(html.indexOf(">a ")).toBeLessThan(html.indexOf(">b "));
  });

  it("shows verdict badges per row", () => {
    const html = renderHeatmap(diagonal, [
      { class_name: "a", verdict: "validated" },
      { class_name: "b", verdict: "failed" },
    ]);
    expect(html).toContain('badge-validated">validated');
    expect(html).toContain('badge-failed">failed');
  });

  it("renders an all-zero matrix at uniform minimal intensity with a no-data badge", () => {
    const zero: AlignmentMatrix = {
      rows: ["a", "b"],
      cols: ["t1", "t2"],
      counts: [
        [0, 0],
        [0, 0],
      ],
    };
    const html = renderHeatmap(zero);
    expect(html.match(/data-intensity="0\.0000"/g)).toHaveLength(4);
    expect(html).toContain("no data");
  });
});

describe("color ramp", () => {
  it("is dark at 0 and bright yellow at 1", () => {
    expect(rampColor(0)).toBe("rgb(68,1,84)");
    expect(rampColor(1)).toBe("rgb(253,231,37)");
  });

  it("clamps out-of-range intensities", () => {
    expect(rampColor(-1)).toBe(rampColor(0));
    expect(rampColor(2)).toBe(rampColor(1));
  });
});
