import { describe, expect, it } from "vitest";

import type { OrdlogClient } from "../src/api.js";
import { ExplorerController } from "../src/state.js";
import type { VariantListResponse } from "../src/types.js";

function variantList(granularity: string, total: number): VariantListResponse {
  return {
    schema_version: 1,
    granularity: granularity as any,
    tiebreaker_id: null,
    total_variants: total,
    total_cases: total,
    page: 1,
    page_size: 50,
    variants: [],
  };
}

type Resolver = (v: VariantListResponse) => void;

function fakeClient(overrides: Partial<Record<keyof OrdlogClient, unknown>> = {}): OrdlogClient {
  const base = {
    baseUrl: "http://fake",
    health: async () => true,
    uploadLog: async () => ({
      schema_version: 1,
      log_id: "log1",
      summary: { events: 2, cases: 1, activities: 2, order_pairs: 0, consistent: true },
    }),
    consistency: async () => ({
      schema_version: 1,
      consistent: true,
      time_constrained: true,
      order_constrained: false,
      violations: [],
      violations_truncated: false,
    }),
    variants: async (_id: string, g: string) => variantList(g, 1),
    variantDetail: async () => ({
      canonical_key: "k",
      frequency: 1,
      case_ids: ["c"],
      nodes: [{ idx: 0, activity: "a" }],
      hasse_edges: [],
    }),
    putTiebreaker: async () => ({
      ok: true,
      accepted: { schema_version: 1, tiebreaker_id: "tb1", pairs: [], conflicts: [] },
    }),
    sequentialize: async () => ({ bytes: new ArrayBuffer(3), filename: "x.xes", traceCount: 6 }),
    granularities: async () => ({
      schema_version: 1,
      levels: [{ granularity: "hour", variant_count: 1 }],
    }),
    ...overrides,
  };
  return base as unknown as OrdlogClient;
}

describe("ExplorerController", () => {
  it("upload populates state from the response only", async () => {
    const c = new ExplorerController(fakeClient());
    await c.uploadLog(new Uint8Array([1]), "log.csv", {});
    expect(c.state.logId).toBe("log1");
    expect(c.state.summary?.events).toBe(2);
    expect(c.state.variants?.total_variants).toBe(1);
    expect(c.state.sweep).toHaveLength(1);
    expect(c.state.busy).toBe(false);
  });

  it("granularity change refreshes variants for the committed level", async () => {
    const calls: string[] = [];
    const c = new ExplorerController(
      fakeClient({
        variants: async (_id: string, g: string) => {
          calls.push(g);
          return variantList(g, 2);
        },
      }),
    );
    await c.uploadLog(new Uint8Array([1]), "log.csv", {});
    await c.setGranularity("day");
    expect(calls.at(-1)).toBe("day");
    expect(c.state.variants?.granularity).toBe("day");
    expect(c.state.page).toBe(1);
  });

  it("discards stale variant responses by sequence token", async () => {
    const pending: Array<{ g: string; resolve: Resolver }> = [];
    const c = new ExplorerController(
      fakeClient({
        variants: (_id: string, g: string) =>
          new Promise<VariantListResponse>((resolve) => pending.push({ g, resolve })),
      }),
    );
    c.state.logId = "log1";
    const first = c.refreshVariants();
    c.state = { ...c.state, granularity: "day" };
    const second = c.refreshVariants();
    expect(pending).toHaveLength(2);
    // resolve the NEWER request first, then the stale one
    pending[1].resolve(variantList("day", 7));
    await second;
    pending[0].resolve(variantList("hour", 99));
    await first;
    expect(c.state.variants?.total_variants).toBe(7);
    expect(c.state.variants?.granularity).toBe("day");
  });

  it("blocked tiebreaker commit keeps the committed id and surfaces pairs", async () => {
    const conflicts = [
      {
        first_id: "e2",
        second_id: "e1",
        first_activity: "dec",
        second_activity: "reg",
        contradicts: "explicit-order",
      },
    ];
    const c = new ExplorerController(
      fakeClient({ putTiebreaker: async () => ({ ok: false, conflicts }) }),
    );
    await c.uploadLog(new Uint8Array([1]), "log.csv", {});
    c.editTiebreakerDraft("dec -> reg");
    const result = await c.commitTiebreaker();
    expect(result && !result.ok).toBe(true);
    expect(c.state.tiebreakerId).toBeNull();
    expect(c.state.tiebreakerConflicts).toEqual(conflicts);
  });

  it("successful commit refreshes variants with the new tiebreaker id", async () => {
    const seen: Array<string | null> = [];
    const c = new ExplorerController(
      fakeClient({
        variants: async (_id: string, g: string, tb: string | null) => {
          seen.push(tb);
          return variantList(g, 1);
        },
      }),
    );
    await c.uploadLog(new Uint8Array([1]), "log.csv", {});
    c.editTiebreakerDraft("a -> b");
    await c.commitTiebreaker();
    expect(c.state.tiebreakerId).toBe("tb1");
    expect(seen.at(-1)).toBe("tb1");
  });

  it("export records filename and trace count from headers", async () => {
    const c = new ExplorerController(fakeClient());
    await c.uploadLog(new Uint8Array([1]), "log.csv", {});
    const result = await c.exportLog(3, 0, "xes");
    expect(result?.traceCount).toBe(6);
    expect(c.state.lastExport).toEqual({ filename: "x.xes", traceCount: 6 });
  });

  it("api failures land in state.error, not exceptions", async () => {
    const c = new ExplorerController(
      fakeClient({
        variants: async () => {
          throw new Error("boom");
        },
      }),
    );
    await c.uploadLog(new Uint8Array([1]), "log.csv", {});
    expect(c.state.error).toContain("boom");
  });
});
