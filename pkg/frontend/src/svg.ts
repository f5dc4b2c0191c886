/** Minimal SVG assembly: axes, gridlines, polylines, legend. No DOM. */

import { FigureData } from "./figures.js";
import { formatTick, linearScale, logScale, Scale } from "./scale.js";

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 40, right: 24, bottom: 56, left: 84 };

const COLORS = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function figureSvg(data: FigureData, title?: string): string {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;

  const allX = data.series.flatMap((s) => s.points.map((p) => p[0]));
  const allY = data.series.flatMap((s) => s.points.map((p) => p[1]));
  const xScale = linearScale(Math.min(...allX), Math.max(...allX), x0, x1);
  const yScale: Scale = data.logY
    ? logScale(Math.min(...allY), Math.max(...allY), y0, y1)
    : linearScale(Math.min(0, ...allY), Math.max(...allY), y0, y1);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
  );
  if (title) {
    parts.push(
      `<text x="${WIDTH / 2}" y="${MARGIN.top / 2 + 6}" text-anchor="middle" font-size="16">${esc(title)}</text>`,
    );
  }

  for (const t of yScale.ticks()) {
    const py = yScale.toPixel(t);
    parts.push(
      `<line x1="${x0}" y1="${py.toFixed(2)}" x2="${x1}" y2="${py.toFixed(2)}" stroke="#dddddd"/>`,
      `<text x="${x0 - 8}" y="${(py + 4).toFixed(2)}" text-anchor="end" font-size="12">${formatTick(t)}</text>`,
    );
  }
  for (const t of xScale.ticks()) {
    const px = xScale.toPixel(t);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${y0}" x2="${px.toFixed(2)}" y2="${y0 + 5}" stroke="#333333"/>`,
      `<text x="${px.toFixed(2)}" y="${y0 + 20}" text-anchor="middle" font-size="12">${formatTick(t)}</text>`,
    );
  }
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="#333333"/>`,
    `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="#333333"/>`,
    `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="13">${esc(data.xLabel)}</text>`,
    `<text x="18" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${(y0 + y1) / 2})">${esc(data.yLabel)}</text>`,
  );

  data.series.forEach((s, i) => {
    const color = COLORS[i % COLORS.length];
    const pts: string[] = [];
    let prev: [number, number] | null = null;
    for (const [x, y] of s.points) {
      const px = xScale.toPixel(x);
      const py = yScale.toPixel(y);
      if (s.step && prev !== null) {
        // horizontal-then-vertical step for CDF curves
        pts.push(`${px.toFixed(2)},${yScale.toPixel(prev[1]).toFixed(2)}`);
      }
      pts.push(`${px.toFixed(2)},${py.toFixed(2)}`);
      prev = [x, y];
    }
    parts.push(
      `<polyline fill="none" stroke="${color}" stroke-width="1.8" points="${pts.join(" ")}"/>`,
    );
    const ly = y1 + 16 + i * 18;
    parts.push(
      `<line x1="${x1 - 150}" y1="${ly - 4}" x2="${x1 - 120}" y2="${ly - 4}" stroke="${color}" stroke-width="2"/>`,
      `<text x="${x1 - 112}" y="${ly}" font-size="12">${esc(s.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}
