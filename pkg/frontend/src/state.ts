// View state and controller. The invariant throughout: the UI never derives
// analytical numbers locally; it only stores service responses. Concurrent
// fetches are tolerated by per-slot request tokens: a response is applied
// only if no newer request for the same slot has been issued since.

import type { ExportResult, OrdlogClient, TiebreakerResult } from "./api.js";
import { ApiError } from "./api.js";
import type {
  GranularityName,
  IngestConfigPayload,
  LevelCount,
  LogSummary,
  TiebreakerConflict,
  VariantListResponse,
  VariantPayload,
} from "./types.js";

export interface ViewState {
  logId: string | null;
  summary: LogSummary | null;
  consistent: boolean | null;
  granularity: GranularityName;
  tiebreakerId: string | null;
  tiebreakerDraft: string;
  tiebreakerConflicts: TiebreakerConflict[];
  page: number;
  variants: VariantListResponse | null;
  selectedVariant: VariantPayload | null;
  sweep: LevelCount[] | null;
  busy: boolean;
  error: string | null;
  lastExport: { filename: string; traceCount: number } | null;
}

export function initialState(): ViewState {
  return {
    logId: null,
    summary: null,
    consistent: null,
    granularity: "hour", // the explorer's initial aggregation level
    tiebreakerId: null,
    tiebreakerDraft: "",
    tiebreakerConflicts: [],
    page: 1,
    variants: null,
    selectedVariant: null,
    sweep: null,
    busy: false,
    error: null,
    lastExport: null,
  };
}

type Listener = (state: ViewState) => void;

export class ExplorerController {
  state: ViewState = initialState();
  private listeners: Listener[] = [];
  private tokens: Record<string, number> = {};

  constructor(private readonly client: OrdlogClient) {}

  subscribe(fn: Listener): void {
    this.listeners.push(fn);
  }

  private emit(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
  }

  private issue(slot: string): number {
    this.tokens[slot] = (this.tokens[slot] ?? 0) + 1;
    return this.tokens[slot];
  }

  private fresh(slot: string, token: number): boolean {
    return this.tokens[slot] === token;
  }

  async uploadLog(
    file: Uint8Array | Blob,
    filename: string,
    config: IngestConfigPayload,
  ): Promise<void> {
    const token = this.issue("upload");
    this.emit({ busy: true, error: null });
    try {
      const resp = await this.client.uploadLog(file, filename, config);
      if (!this.fresh("upload", token)) return;
      this.emit({
        logId: resp.log_id,
        summary: resp.summary,
        consistent: resp.summary.consistent,
        page: 1,
        tiebreakerId: null,
        tiebreakerConflicts: [],
        variants: null,
        selectedVariant: null,
        sweep: null,
        lastExport: null,
      });
      // eager fetches so granularity changes feel instant
      await Promise.all([this.refreshVariants(), this.refreshSweep()]);
    } catch (exc) {
      if (this.fresh("upload", token)) this.emit({ error: describe(exc) });
    } finally {
      if (this.fresh("upload", token)) this.emit({ busy: false });
    }
  }

  async setGranularity(granularity: GranularityName): Promise<void> {
    this.emit({ granularity, page: 1, selectedVariant: null });
    await this.refreshVariants();
  }

  async setPage(page: number): Promise<void> {
    this.emit({ page });
    await this.refreshVariants();
  }

  async refreshVariants(): Promise<void> {
    const { logId, granularity, tiebreakerId, page } = this.state;
    if (!logId) return;
    const token = this.issue("variants");
    try {
      const resp = await this.client.variants(logId, granularity, tiebreakerId, page);
      if (!this.fresh("variants", token)) return; // stale response discarded
      this.emit({ variants: resp, error: null });
    } catch (exc) {
      if (this.fresh("variants", token)) this.emit({ variants: null, error: describe(exc) });
    }
  }

  async refreshSweep(): Promise<void> {
    const { logId, tiebreakerId } = this.state;
    if (!logId) return;
    const token = this.issue("sweep");
    try {
      const resp = await this.client.granularities(logId, tiebreakerId);
      if (!this.fresh("sweep", token)) return;
      this.emit({ sweep: resp.levels });
    } catch (exc) {
      if (this.fresh("sweep", token)) this.emit({ sweep: null, error: describe(exc) });
    }
  }

  editTiebreakerDraft(text: string): void {
    this.emit({ tiebreakerDraft: text });
  }

  /** Validate the draft against the service; commit only when conflict-free. */
  async commitTiebreaker(): Promise<TiebreakerResult | null> {
    const { logId, granularity, tiebreakerDraft } = this.state;
    if (!logId) return null;
    const token = this.issue("tiebreaker");
    this.emit({ busy: true });
    try {
      const result = await this.client.putTiebreaker(logId, tiebreakerDraft, granularity);
      if (!this.fresh("tiebreaker", token)) return result;
      if (result.ok) {
        this.emit({
          tiebreakerId: result.accepted.tiebreaker_id,
          tiebreakerConflicts: [],
          error: null,
        });
        await Promise.all([this.refreshVariants(), this.refreshSweep()]);
      } else {
        // commit blocked: committed id unchanged, offending pairs surfaced
        this.emit({ tiebreakerConflicts: result.conflicts });
      }
      return result;
    } catch (exc) {
      if (this.fresh("tiebreaker", token)) this.emit({ error: describe(exc) });
      return null;
    } finally {
      if (this.fresh("tiebreaker", token)) this.emit({ busy: false });
    }
  }

  async selectVariant(key: string | null): Promise<void> {
    if (key === null) {
      this.emit({ selectedVariant: null });
      return;
    }
    const { logId, granularity, tiebreakerId } = this.state;
    if (!logId) return;
    const token = this.issue("detail");
    try {
      const detail = await this.client.variantDetail(logId, key, granularity, tiebreakerId);
      if (!this.fresh("detail", token)) return;
      this.emit({ selectedVariant: detail });
    } catch (exc) {
      if (this.fresh("detail", token)) this.emit({ error: describe(exc) });
    }
  }

  async exportLog(k: number, seed: number, format: "xes" | "csv"): Promise<ExportResult | null> {
    const { logId, granularity, tiebreakerId } = this.state;
    if (!logId) return null;
    this.emit({ busy: true });
    try {
      const result = await this.client.sequentialize(logId, {
        k,
        seed,
        format,
        granularity,
        tiebreaker_id: tiebreakerId,
      });
      this.emit({
        lastExport: { filename: result.filename, traceCount: result.traceCount },
        error: null,
      });
      return result;
    } catch (exc) {
      this.emit({ error: describe(exc) });
      return null;
    } finally {
      this.emit({ busy: false });
    }
  }
}

function describe(exc: unknown): string {
  if (exc instanceof ApiError) return `${exc.status}: ${exc.message}`;
  return String(exc);
}
