import { describe, expect, it } from "vitest";

import {
  BONES,
  bboxCommands,
  contributionBars,
  cropRowToLine,
  hullCommands,
  lineRowInCrop,
  plotSeries,
  resampleColumn,
  sharedRange,
  skeletonCommands,
  toCropLocal,
} from "../src/overlay.js";
import { parsePoseStream } from "../src/poses.js";
import { rowRates, cellColor, cellTooltip } from "../src/heatmap.js";

describe("crop coordinate mapping", () => {
  it("shifts by the crop origin", () => {
    expect(toCropLocal([110, 60], [100, 50])).toEqual([10, 10]);
  });

  it("maps the trampoline line into and out of the crop", () => {
    expect(lineRowInCrop(400, [120, 340], 200)).toBe(60);
    expect(lineRowInCrop(400, [120, 90], 200)).toBeNull(); // below the crop
    expect(cropRowToLine(60, [120, 340])).toBe(400);
  });
});

describe("skeleton overlay", () => {
  const joints = Array.from({ length: 16 }, (_, i) => [i * 10, i * 5, 1.0]);

  it("draws every bone and joint when confident", () => {
    const cmds = skeletonCommands(joints, [0, 0]);
    expect(cmds.filter((c) => c.kind === "polyline")).toHaveLength(BONES.length);
    expect(cmds.filter((c) => c.kind === "circle")).toHaveLength(16);
  });

  it("hides low-confidence joints and their bones", () => {
    const dim = joints.map((j) => [...j]);
    dim[0][2] = 0.05; // right ankle untrusted
    const cmds = skeletonCommands(dim, [0, 0]);
    expect(cmds.filter((c) => c.kind === "circle")).toHaveLength(15);
    expect(cmds.filter((c) => c.kind === "polyline")).toHaveLength(BONES.length - 1);
  });
});

describe("hull and bbox", () => {
  it("closes the hull polygon", () => {
    const cmds = hullCommands([[0, 0], [10, 0], [10, 10]], [0, 0]);
    expect(cmds[0].points[0]).toEqual(cmds[0].points[3]);
  });

  it("bbox becomes a rect command in crop space", () => {
    const [cmd] = bboxCommands([100, 200, 150, 260], [90, 190]);
    expect(cmd.points).toEqual([[10, 10], [60, 70]]);
  });
});

describe("plotting helpers", () => {
  it("resamples linearly with exact endpoints", () => {
    expect(resampleColumn([0, 90, 180], 5)).toEqual([0, 45, 90, 135, 180]);
    expect(resampleColumn([5, 7], 2)).toEqual([5, 7]);
  });

  it("scales a series into the viewport", () => {
    const plot = plotSeries([0, 50, 100], 200, 100);
    expect(plot.points[0]).toEqual([0, 100]);
    expect(plot.points[2]).toEqual([200, 0]);
    expect(plot.points[1][1]).toBeCloseTo(50);
  });

  it("shared range covers both series", () => {
    expect(sharedRange([0, 10], [-5, 3])).toEqual([-5, 10]);
  });

  it("contribution bars scale to the largest contribution", () => {
    const widths = contributionBars([1, 2, 4], 100);
    expect(widths).toEqual([25, 50, 100]);
    expect(contributionBars([0, 0], 80)).toEqual([0, 0]);
  });
});

describe("confusion presentation", () => {
  const cm = { labels: ["FPF", "FSF"], counts: [[8, 2], [0, 0]] };

  it("row rates handle empty rows", () => {
    expect(rowRates(cm.counts)).toEqual([[0.8, 0.2], [0, 0]]);
  });

  it("colors the diagonal darkest for a diagonal matrix", () => {
    expect(cellColor(1)).not.toBe(cellColor(0));
    expect(cellColor(0)).toBe("rgb(255, 255, 255)");
  });

  it("tooltips show the raw count", () => {
    expect(cellTooltip(cm, 0, 1)).toContain("2 times");
    expect(cellTooltip(cm, 0, 1)).toContain("FPF identified as FSF");
  });
});

describe("pose stream parsing", () => {
  it("skips the header and indexes joints by frame", () => {
    const joints = JSON.stringify(Array.from({ length: 16 }, () => [1, 2, 1]));
    const text =
      `{"fps": 30.0, "coords": "full"}\n` +
      `{"frame": 4, "joints": ${joints}}\n\n` +
      `{"frame": 7, "joints": ${joints}}\n`;
    const map = parsePoseStream(text);
    expect([...map.keys()]).toEqual([4, 7]);
    expect(map.get(4)).toHaveLength(16);
  });
});
