import { describe, expect, it } from "vitest";

import { isVariantPayload, renderVariant, renderVariantCard } from "../src/render.js";
import { sweepChart } from "../src/chart.js";
import type { VariantPayload } from "../src/types.js";

const FIG3_VARIANT: VariantPayload = {
  canonical_key: "abc123",
  frequency: 3,
  case_ids: ["9901", "9902", "9903"],
  nodes: [
    { idx: 0, activity: "ch" },
    { idx: 1, activity: "ct" },
    { idx: 2, activity: "et" },
    { idx: 3, activity: "dec" },
    { idx: 4, activity: "pay" },
    { idx: 5, activity: "reg" },
  ],
  hasse_edges: [
    [5, 0], [5, 1], [5, 2],
    [0, 3], [1, 3], [2, 3],
    [3, 4],
  ],
};

describe("renderVariant", () => {
  it("renders nodes, hasse edges and a frequency badge", () => {
    const svg = renderVariant(FIG3_VARIANT);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.match(/<g class="node"/g)).toHaveLength(6);
    expect(svg.match(/<path class="edge"/g)).toHaveLength(7);
    expect(svg).toContain(">3×<");
    expect(svg).toContain('data-key="abc123"');
  });

  it("renders a single-node variant with no edges", () => {
    const svg = renderVariant({
      canonical_key: "k",
      frequency: 1,
      case_ids: ["c"],
      nodes: [{ idx: 0, activity: "only" }],
      hasse_edges: [],
    });
    expect(svg.match(/<g class="node"/g)).toHaveLength(1);
    expect(svg).not.toContain('<path class="edge"');
  });

  it("renders a 2-antichain side by side", () => {
    const svg = renderVariant({
      canonical_key: "k2",
      frequency: 1,
      case_ids: ["c"],
      nodes: [
        { idx: 0, activity: "a" },
        { idx: 1, activity: "b" },
      ],
      hasse_edges: [],
    });
    const xs = [...svg.matchAll(/<g class="node"[^>]*><rect x="([\d.]+)"/g)].map((m) =>
      Number(m[1]),
    );
    expect(xs).toHaveLength(2);
    expect(new Set(xs).size).toBe(1); // same column
  });

  it("returns an error panel instead of crashing on malformed payloads", () => {
    expect(renderVariant(null)).toContain("error-panel");
    expect(renderVariant({ canonical_key: 1 })).toContain("error-panel");
    const badEdge = { ...FIG3_VARIANT, hasse_edges: [[0, 99]] };
    expect(renderVariant(badEdge)).toContain("error-panel");
  });

  it("escapes activity labels", () => {
    const svg = renderVariant({
      canonical_key: "k",
      frequency: 1,
      case_ids: ["c"],
      nodes: [{ idx: 0, activity: "<b>&" }],
      hasse_edges: [],
    });
    expect(svg).toContain("&lt;b&gt;&amp;");
    expect(svg).not.toContain("<b>&");
  });
});

describe("isVariantPayload", () => {
  it("accepts wire-shaped payloads", () => {
    expect(isVariantPayload(FIG3_VARIANT)).toBe(true);
  });
  it("rejects edges out of range", () => {
    expect(isVariantPayload({ ...FIG3_VARIANT, hasse_edges: [[-1, 0]] })).toBe(false);
  });
});

describe("renderVariantCard", () => {
  it("wraps the svg with a footer", () => {
    const html = renderVariantCard(FIG3_VARIANT);
    expect(html).toContain("variant-card");
    expect(html).toContain("3 case(s)");
  });
});

describe("sweepChart", () => {
  it("draws one point per level with counts", () => {
    const svg = sweepChart([
      { granularity: "day", variant_count: 4 },
      { granularity: "hour", variant_count: 7 },
      { granularity: "year", variant_count: 1 },
    ]);
    expect(svg.match(/<circle class="sweep-point"/g)).toHaveLength(3);
    // ordered fine -> coarse regardless of input order
    const order = [...svg.matchAll(/data-granularity="(\w+)"/g)].map((m) => m[1]);
    expect(order).toEqual(["hour", "day", "year"]);
  });

  it("flat single-case series renders all equal counts", () => {
    const svg = sweepChart(
      ["millisecond", "day", "year"].map((g) => ({
        granularity: g as any,
        variant_count: 1,
      })),
    );
    const counts = [...svg.matchAll(/data-count="(\d+)"/g)].map((m) => m[1]);
    expect(counts).toEqual(["1", "1", "1"]);
  });

  it("handles empty input", () => {
    expect(sweepChart([])).toContain("error-panel");
  });

  it("highlights the committed granularity", () => {
    const svg = sweepChart(
      [
        { granularity: "day", variant_count: 2 },
        { granularity: "hour", variant_count: 3 },
      ],
      "day",
    );
    expect(svg).toContain('data-granularity="day" data-count="2" cx=');
    expect(svg).toMatch(/data-granularity="day"[^/]*r="6"/);
  });
});
