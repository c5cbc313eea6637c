/** Minimal SVG line chart for BPF comparison rows.
 *
 * Coordinates are scaled for drawing only; every number a user reads (axis
 * labels, legend optima) is the API's own string.
 */

import type { ComparisonWire } from "./types.js";
import { formatMoney } from "./dom.js";

const WIDTH = 560;
const HEIGHT = 240;
const MARGIN = 34;
const COLORS = ["#4464ad", "#c0392b", "#1e8449", "#8e44ad"];

export function comparisonChart(
  comparison: ComparisonWire,
  labels: string[],
): SVGSVGElement {
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "comparison-chart");
  svg.setAttribute("data-testid", "bpf-chart");

  const rows = comparison.rows;
  if (rows.length === 0) return svg;
  const columns = rows[0].breach_probs.length;
  const maxProb = Math.max(...rows.flatMap((row) => row.breach_probs), 1e-9);

  const x = (index: number) =>
    MARGIN + (index * (WIDTH - 2 * MARGIN)) / Math.max(rows.length - 1, 1);
  const y = (prob: number) => HEIGHT - MARGIN - (prob / maxProb) * (HEIGHT - 2 * MARGIN);

  for (let column = 0; column < columns; column += 1) {
    const points = rows
      .map((row, index) => `${x(index).toFixed(1)},${y(row.breach_probs[column]).toFixed(1)}`)
      .join(" ");
    const line = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
    line.setAttribute("points", points);
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", COLORS[column % COLORS.length]);
    line.setAttribute("stroke-width", "2");
    line.setAttribute("data-series", labels[column] ?? `series ${column}`);
    svg.append(line);
  }

  // x axis labels: the grid's own money strings
  rows.forEach((row, index) => {
    if (index % Math.ceil(rows.length / 6) !== 0 && index !== rows.length - 1) return;
    const text = document.createElementNS("http://www.w3.org/2000/svg", "text");
    text.setAttribute("x", x(index).toFixed(1));
    text.setAttribute("y", String(HEIGHT - 10));
    text.setAttribute("font-size", "10");
    text.setAttribute("text-anchor", "middle");
    text.textContent = formatMoney(row.z);
    svg.append(text);
  });

  return svg;
}
