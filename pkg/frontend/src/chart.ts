/**
 * Step-line capital chart rendered as SVG path data.  These are pure
 * coordinate transforms of service-reported series; no model values are
 * computed here.
 */

export interface ChartGeometry {
  width: number;
  height: number;
  pad: number;
}

export interface Scales {
  x: (t: number) => number;
  y: (v: number) => number;
  tMin: number;
  tMax: number;
  vMin: number;
  vMax: number;
}

export function chartScales(
  times: number[],
  values: number[],
  geo: ChartGeometry,
): Scales {
  if (times.length === 0 || times.length !== values.length) {
    throw new Error("times and values must be equal-length and non-empty");
  }
  const tMin = Math.min(...times);
  const tMax = Math.max(...times);
  let vMin = Math.min(...values, 0);
  let vMax = Math.max(...values, 0);
  if (vMax === vMin) {
    vMax = vMin + 1;
  }
  const innerW = geo.width - 2 * geo.pad;
  const innerH = geo.height - 2 * geo.pad;
  const tSpan = tMax > tMin ? tMax - tMin : 1;
  return {
    x: (t) => geo.pad + ((t - tMin) / tSpan) * innerW,
    y: (v) => geo.pad + (1 - (v - vMin) / (vMax - vMin)) * innerH,
    tMin,
    tMax,
    vMin,
    vMax,
  };
}

/** SVG path holding each value until the next time point (step line). */
export function stepLinePath(times: number[], values: number[], scales: Scales): string {
  if (times.length === 0) return "";
  const parts: string[] = [];
  for (let k = 0; k < times.length; k += 1) {
    const x = scales.x(times[k]!);
    const y = scales.y(values[k]!);
    if (k === 0) {
      parts.push(`M${x.toFixed(2)},${y.toFixed(2)}`);
    } else {
      const prevY = scales.y(values[k - 1]!);
      parts.push(`L${x.toFixed(2)},${prevY.toFixed(2)}`);
      parts.push(`L${x.toFixed(2)},${y.toFixed(2)}`);
    }
  }
  return parts.join(" ");
}

/** Vertical marker positions at each run boundary (global offsets). */
export function runBoundaryMarkers(offsets: number[], scales: Scales): number[] {
  return offsets.filter((t) => t > scales.tMin).map((t) => scales.x(t));
}

/** y position of the zero-capital guide line. */
export function zeroLine(scales: Scales): number {
  return scales.y(0);
}
