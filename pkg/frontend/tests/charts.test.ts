import { describe, expect, it } from "vitest";

import { renderChart } from "../src/charts.js";
import { makeSpec } from "./helpers.js";

describe("renderChart", () => {
  it("renders one rect per data row for bar charts", () => {
    const chart = renderChart(document, makeSpec({ plot_type: "bar" }));
    expect(chart.getAttribute("data-chart-kind")).toBe("bar");
    expect(chart.querySelectorAll("rect")).toHaveLength(3);
  });

  it("renders a polyline for line charts", () => {
    const chart = renderChart(document, makeSpec({ plot_type: "line" }));
    expect(chart.getAttribute("data-chart-kind")).toBe("line");
    const polyline = chart.querySelector("polyline");
    expect(polyline).not.toBeNull();
    expect(polyline?.getAttribute("points")?.split(" ")).toHaveLength(3);
  });

  it("renders shaded cells for heatmaps", () => {
    const chart = renderChart(document, makeSpec({ plot_type: "heatmap" }));
    expect(chart.getAttribute("data-chart-kind")).toBe("heatmap");
    expect(chart.querySelectorAll("rect.cell")).toHaveLength(3);
  });

  it("falls back to a warning placeholder for unknown plot types", () => {
    const chart = renderChart(document, makeSpec({ plot_type: "pie" }));
    expect((chart as HTMLElement).dataset.chartKind).toBe("placeholder");
    expect(chart.querySelector(".warning-badge")?.textContent).toContain("pie");
  });

  it("copes with empty data", () => {
    const chart = renderChart(document, makeSpec({ data: [] }));
    expect(chart.querySelectorAll("rect")).toHaveLength(0);
  });
});
