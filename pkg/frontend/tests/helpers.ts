import type { ScreenPayload, VizSpec } from "../src/types.js";

export function makeSpec(overrides: Partial<VizSpec> = {}): VizSpec {
  return {
    schema: "vizspec/1",
    id: "01",
    plot_type: "bar",
    axes: { x: "CRIME_TYPE", y: "count" },
    entities: [
      { slot: "CRIME_TYPE", value: "theft" },
      { slot: "NEIGHBORHOOD", value: "downtown" },
    ],
    title: "Theft in Downtown",
    data: [
      { category: "monday", count: 4 },
      { category: "tuesday", count: 9 },
      { category: "friday", count: 2 },
    ],
    semantic_vector: new Array(11).fill(0),
    layout: { state: "normal", raised_at: null },
    created_at: 1,
    ...overrides,
  };
}

export function makeScreen(specs: VizSpec[]): ScreenPayload {
  return { specs, layout: { order: specs.map((s) => s.id) } };
}
