/**
 * (market rate, lock-up) viability heatmap backed by /scan responses.
 * Cell truth comes entirely from the service; cells carry the same
 * traffic-light vocabulary as run outcomes.
 */

import type { ScanSurface, TrafficLabel } from "./types";

export interface HeatmapCell {
  i: number;
  T: number;
  viable: boolean;
  label: TrafficLabel;
  terminalCapital: number;
}

/** Row-major cells: one row per market rate, one column per lock-up. */
export function buildHeatmap(surface: ScanSurface): HeatmapCell[][] {
  return surface.axis_i.map((i, ii) =>
    surface.axis_T.map((T, ti) => ({
      i,
      T,
      viable: surface.viable[ii]![ti]! === 1,
      label: surface.labels[ii]![ti]!,
      terminalCapital: surface.terminal_capital[ii]![ti]!,
    })),
  );
}

export function cellClass(label: TrafficLabel): string {
  return { Red: "cell-red", Yellow: "cell-yellow", Green: "cell-green" }[label];
}

export function findCells(
  cells: HeatmapCell[][],
  predicate: (cell: HeatmapCell) => boolean,
): HeatmapCell[] {
  return cells.flat().filter(predicate);
}
