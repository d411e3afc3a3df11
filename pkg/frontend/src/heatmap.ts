// Confusion-matrix presentation: row-normalised shading with raw counts in
// the tooltip. Counts come straight from the evaluation report.

import type { ConfusionDoc } from "./types.js";

export function rowRates(counts: number[][]): number[][] {
  return counts.map((row) => {
    const total = row.reduce((a, b) => a + b, 0);
    return row.map((v) => (total > 0 ? v / total : 0));
  });
}

/** White-to-blue ramp; rate in [0, 1]. */
export function cellColor(rate: number): string {
  const clamped = Math.min(1, Math.max(0, rate));
  const level = Math.round(255 - 205 * clamped);
  return `rgb(${level}, ${level}, 255)`;
}

export function cellTooltip(cm: ConfusionDoc, row: number, col: number): string {
  const rate = rowRates(cm.counts)[row][col];
  return (
    `${cm.labels[row]} identified as ${cm.labels[col]}: ` +
    `${cm.counts[row][col]} times (${(rate * 100).toFixed(1)}% of row)`
  );
}
