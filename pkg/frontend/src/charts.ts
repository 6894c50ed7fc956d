import type { DataRow, VizSpec } from "./types.js";

const WIDTH = 280;
const HEIGHT = 150;
const PAD = 18;
const SVG_NS = "http://www.w3.org/2000/svg";

export const KNOWN_PLOT_TYPES = ["bar", "line", "heatmap"] as const;

function svgElement(doc: Document, tag: string, attrs: Record<string, string>): SVGElement {
  const el = doc.createElementNS(SVG_NS, tag) as SVGElement;
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, value);
  }
  return el;
}

function frame(doc: Document, kind: string): SVGElement {
  const svg = svgElement(doc, "svg", {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    width: String(WIDTH),
    height: String(HEIGHT),
    class: `chart chart-${kind}`,
    "data-chart-kind": kind,
  });
  return svg;
}

function maxCount(rows: DataRow[]): number {
  return rows.reduce((acc, row) => Math.max(acc, row.count), 0) || 1;
}

function renderBar(doc: Document, rows: DataRow[]): SVGElement {
  const svg = frame(doc, "bar");
  const top = maxCount(rows);
  const slot = (WIDTH - 2 * PAD) / Math.max(rows.length, 1);
  rows.forEach((row, i) => {
    const h = ((HEIGHT - 2 * PAD) * row.count) / top;
    const rect = svgElement(doc, "rect", {
      x: String(PAD + i * slot + slot * 0.15),
      y: String(HEIGHT - PAD - h),
      width: String(slot * 0.7),
      height: String(h),
      class: "bar",
    });
    rect.appendChild(svgElement(doc, "title", {})).textContent = `${row.category}: ${row.count}`;
    svg.appendChild(rect);
  });
  return svg;
}

function renderLine(doc: Document, rows: DataRow[]): SVGElement {
  const svg = frame(doc, "line");
  const top = maxCount(rows);
  const step = (WIDTH - 2 * PAD) / Math.max(rows.length - 1, 1);
  const points = rows
    .map((row, i) => {
      const x = PAD + i * step;
      const y = HEIGHT - PAD - ((HEIGHT - 2 * PAD) * row.count) / top;
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
  svg.appendChild(svgElement(doc, "polyline", { points, class: "line", fill: "none" }));
  return svg;
}

function renderHeatmap(doc: Document, rows: DataRow[]): SVGElement {
  const svg = frame(doc, "heatmap");
  const top = maxCount(rows);
  const columns = Math.ceil(Math.sqrt(rows.length)) || 1;
  const cellW = (WIDTH - 2 * PAD) / columns;
  const cellH = (HEIGHT - 2 * PAD) / Math.ceil(rows.length / columns || 1);
  rows.forEach((row, i) => {
    const cell = svgElement(doc, "rect", {
      x: String(PAD + (i % columns) * cellW),
      y: String(PAD + Math.floor(i / columns) * cellH),
      width: String(cellW),
      height: String(cellH),
      class: "cell",
      "fill-opacity": (0.15 + (0.85 * row.count) / top).toFixed(3),
    });
    cell.appendChild(svgElement(doc, "title", {})).textContent = `${row.category}: ${row.count}`;
    svg.appendChild(cell);
  });
  return svg;
}

/**
 * Chart for one visualization spec. Unknown plot types produce a placeholder
 * carrying a warning badge rather than failing the whole screen.
 */
export function renderChart(doc: Document, spec: VizSpec): Element {
  switch (spec.plot_type) {
    case "bar":
      return renderBar(doc, spec.data);
    case "line":
      return renderLine(doc, spec.data);
    case "heatmap":
      return renderHeatmap(doc, spec.data);
    default: {
      const holder = doc.createElement("div");
      holder.className = "chart chart-placeholder";
      holder.dataset.chartKind = "placeholder";
      const badge = doc.createElement("span");
      badge.className = "warning-badge";
      badge.textContent = `unknown plot type: ${spec.plot_type}`;
      holder.appendChild(badge);
      return holder;
    }
  }
}
