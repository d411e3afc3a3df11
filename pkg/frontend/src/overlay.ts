// Geometry for the crop canvas overlays and the angle plots, kept pure so
// it is testable without a DOM. Crops are served in crop-local pixels;
// every overlay datum arrives in full-frame pixels and is shifted by the
// crop origin before drawing.

export interface DrawCmd {
  kind: "polyline" | "circle" | "rect" | "hline";
  points: [number, number][];
  radius?: number;
  y?: number;
  style: string;
}

// 16-joint MPII bone graph
export const BONES: [number, number][] = [
  [0, 1], [1, 2], [2, 6], [5, 4], [4, 3], [3, 6],
  [6, 7], [7, 8], [8, 9],
  [10, 11], [11, 12], [12, 7], [15, 14], [14, 13], [13, 7],
];

export function toCropLocal(
  point: [number, number],
  origin: [number, number],
): [number, number] {
  return [point[0] - origin[0], point[1] - origin[1]];
}

export function skeletonCommands(
  joints: number[][],
  origin: [number, number],
  confFloor = 0.2,
): DrawCmd[] {
  const cmds: DrawCmd[] = [];
  for (const [a, b] of BONES) {
    const ja = joints[a];
    const jb = joints[b];
    if (!ja || !jb || ja[2] < confFloor || jb[2] < confFloor) continue;
    cmds.push({
      kind: "polyline",
      points: [toCropLocal([ja[0], ja[1]], origin), toCropLocal([jb[0], jb[1]], origin)],
      style: "skeleton",
    });
  }
  for (const j of joints) {
    if (j[2] >= confFloor) {
      cmds.push({
        kind: "circle",
        points: [toCropLocal([j[0], j[1]], origin)],
        radius: 3,
        style: "joint",
      });
    }
  }
  return cmds;
}

export function hullCommands(
  hull: [number, number][],
  origin: [number, number],
): DrawCmd[] {
  if (hull.length === 0) return [];
  const points = hull.map((v) => toCropLocal(v, origin));
  points.push(points[0]);
  return [{ kind: "polyline", points, style: "hull" }];
}

export function bboxCommands(
  bbox: [number, number, number, number],
  origin: [number, number],
): DrawCmd[] {
  const [x0, y0] = toCropLocal([bbox[0], bbox[1]], origin);
  const [x1, y1] = toCropLocal([bbox[2], bbox[3]], origin);
  return [
    {
      kind: "rect",
      points: [
        [x0, y0],
        [x1, y1],
      ],
      style: "bbox",
    },
  ];
}

export function centroidCommands(
  centroid: [number, number],
  origin: [number, number],
): DrawCmd[] {
  return [
    { kind: "circle", points: [toCropLocal(centroid, origin)], radius: 5, style: "centroid" },
  ];
}

/** Trampoline line in crop-local rows; null when outside the crop. */
export function lineRowInCrop(lineRow: number, origin: [number, number], side: number): number | null {
  const local = lineRow - origin[1];
  return local >= 0 && local < side ? local : null;
}

/** Inverse mapping for drag handling. */
export function cropRowToLine(localRow: number, origin: [number, number]): number {
  return Math.round(localRow + origin[1]);
}

export function trampolineLineCommands(
  lineRow: number,
  origin: [number, number],
  side: number,
): DrawCmd[] {
  const local = lineRowInCrop(lineRow, origin, side);
  if (local === null) return [];
  return [{ kind: "hline", points: [], y: local, style: "trampoline" }];
}

/** Linear resampling of one angle column, for drawing a reference under an
 * observed trajectory of different length (presentation only; all numbers
 * shown next to the plot come from the server). */
export function resampleColumn(values: number[], targetLen: number): number[] {
  if (targetLen < 2 || values.length < 2) return values.slice();
  if (values.length === targetLen) return values.slice();
  const out = new Array<number>(targetLen);
  const scale = (values.length - 1) / (targetLen - 1);
  for (let i = 0; i < targetLen; i++) {
    const pos = i * scale;
    const lo = Math.min(Math.floor(pos), values.length - 2);
    const frac = pos - lo;
    out[i] = values[lo] * (1 - frac) + values[lo + 1] * frac;
  }
  return out;
}

export interface PlotSeries {
  points: [number, number][];
  min: number;
  max: number;
}

/** Scale one angle column into a w-by-h viewport (y grows downward). */
export function plotSeries(
  column: number[],
  width: number,
  height: number,
  range?: [number, number],
): PlotSeries {
  const lo = range ? range[0] : Math.min(...column);
  const hi = range ? range[1] : Math.max(...column);
  const span = hi - lo || 1;
  const n = column.length;
  const points: [number, number][] = column.map((v, i) => [
    n > 1 ? (i / (n - 1)) * width : 0,
    height - ((v - lo) / span) * height,
  ]);
  return { points, min: lo, max: hi };
}

/** Shared vertical range so the observed and reference series align. */
export function sharedRange(a: number[], b: number[]): [number, number] {
  return [Math.min(...a, ...b), Math.max(...a, ...b)];
}

/** Per-feature error contributions scaled to bar widths. */
export function contributionBars(perFeature: number[], maxWidth: number): number[] {
  const top = Math.max(...perFeature, 0) || 1;
  return perFeature.map((v) => (v / top) * maxWidth);
}
