import type { AlignmentMatrix, ClassDiagnostic } from "./types.js";
import { escapeHtml } from "./html.js";

/** Min–max normalized intensity in [0, 1]; a flat matrix renders mid-scale. */
export function cellIntensity(matrix: AlignmentMatrix): number[][] {
  const flat = matrix.counts.flat();
  const lo = Math.min(...flat);
  const hi = Math.max(...flat);
  if (hi === lo) {
    return matrix.counts.map((row) => row.map(() => 0.5));
  }
  return matrix.counts.map((row) => row.map((c) => (c - lo) / (hi - lo)));
}

/** Dark-purple-to-yellow ramp: high counts render bright yellow. */
export function rampColor(intensity: number): string {
  const stops: [number, [number, number, number]][] = [
    [0.0, [68, 1, 84]],
    [0.25, [59, 82, 139]],
    [0.5, [33, 145, 140]],
    [0.75, [94, 201, 98]],
    [1.0, [253, 231, 37]],
  ];
  const t = Math.min(1, Math.max(0, intensity));
  for (let i = 1; i < stops.length; i++) {
    const [t1, c1] = stops[i]!;
    const [t0, c0] = stops[i - 1]!;
    if (t <= t1) {
      const f = (t - t0) / (t1 - t0);
      const mix = c0.map((v, j) => Math.round(v + f * (c1[j]! - v)));
      return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
    }
  }
  return "rgb(253,231,37)";
}

/** Render the alignment matrix as an HTML table. Cell order follows the
 * matrix row/col order; hovering a cell shows the exact count via title. */
export function renderHeatmap(
  matrix: AlignmentMatrix,
  diagnostics: ClassDiagnostic[] = [],
): string {
  const verdicts = new Map(diagnostics.map((d) => [d.class_name, d.verdict]));
  const intensity = cellIntensity(matrix);
  const allZero = matrix.counts.flat().every((c) => c === 0);

  const header = matrix.cols
    .map((c) => `<th scope="col">${escapeHtml(c)}</th>`)
    .join("");
  const body = matrix.rows
    .map((rowName, i) => {
      const verdict = verdicts.get(rowName);
      const badge = verdict
        ? `<span class="badge badge-${verdict}">${verdict}</span>`
        : "";
      const cells = matrix.counts[i]!
        .map((count, j) => {
          const level = allZero ? 0 : intensity[i]![j]!;
          return (
            `<td class="cell" data-intensity="${level.toFixed(4)}" ` +
            `style="background:${rampColor(level)}" ` +
            `title="${count}">${count}</td>`
          );
        })
        .join("");
      return `<tr><th scope="row">${escapeHtml(rowName)} ${badge}</th>${cells}</tr>`;
    })
    .join("");

  const emptyBadge = allZero ? `<p class="badge badge-empty">no data</p>` : "";
  return (
    `<table class="heatmap"><thead><tr><th></th>${header}</tr></thead>` +
    `<tbody>${body}</tbody></table>${emptyBadge}`
  );
}
