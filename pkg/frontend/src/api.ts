// Typed client over fetch. The UI holds no analytical state of its own:
// every number it shows comes back from one of these calls.

import type {
  ConsistencyResponse,
  GranularitiesResponse,
  GranularityName,
  IngestConfigPayload,
  TiebreakerAccepted,
  TiebreakerConflict,
  UploadResponse,
  VariantListResponse,
  VariantPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
    public readonly body: unknown = null,
  ) {
    super(message);
  }
}

export type TiebreakerResult =
  | { ok: true; accepted: TiebreakerAccepted }
  | { ok: false; conflicts: TiebreakerConflict[] };

export interface ExportRequest {
  k: number;
  seed: number;
  format: "xes" | "csv";
  granularity?: GranularityName;
  tiebreaker_id?: string | null;
}

export interface ExportResult {
  bytes: ArrayBuffer;
  filename: string;
  traceCount: number;
}

async function jsonOrThrow<T>(resp: Response): Promise<T> {
  const text = await resp.text();
  let body: unknown = null;
  try {
    body = text ? JSON.parse(text) : null;
  } catch {
    body = text;
  }
  if (!resp.ok) {
    const detail =
      body && typeof body === "object" && "detail" in (body as any)
        ? String((body as any).detail)
        : resp.statusText;
    throw new ApiError(resp.status, detail, body);
  }
  return body as T;
}

export class OrdlogClient {
  constructor(public readonly baseUrl: string) {}

  private url(path: string, params: Record<string, string | number | null | undefined> = {}): string {
    const u = new URL(path, this.baseUrl);
    for (const [k, v] of Object.entries(params)) {
      if (v !== null && v !== undefined) u.searchParams.set(k, String(v));
    }
    return u.toString();
  }

  async health(): Promise<boolean> {
    try {
      const resp = await fetch(this.url("/health"));
      return resp.ok;
    } catch {
      return false;
    }
  }

  async uploadLog(
    file: Uint8Array | Blob,
    filename: string,
    config: IngestConfigPayload,
  ): Promise<UploadResponse> {
    const form = new FormData();
    const blob = file instanceof Blob ? file : new Blob([file as BlobPart]);
    form.append("file", blob, filename);
    form.append("config", JSON.stringify(config));
    const resp = await fetch(this.url("/logs"), { method: "POST", body: form });
    return jsonOrThrow<UploadResponse>(resp);
  }

  async consistency(logId: string): Promise<ConsistencyResponse> {
    const resp = await fetch(this.url(`/logs/${logId}/consistency`));
    return jsonOrThrow<ConsistencyResponse>(resp);
  }

  async variants(
    logId: string,
    granularity: GranularityName,
    tiebreakerId: string | null = null,
    page = 1,
    pageSize = 50,
  ): Promise<VariantListResponse> {
    const resp = await fetch(
      this.url(`/logs/${logId}/variants`, {
        granularity,
        tiebreaker_id: tiebreakerId,
        page,
        page_size: pageSize,
      }),
    );
    return jsonOrThrow<VariantListResponse>(resp);
  }

  async variantDetail(
    logId: string,
    key: string,
    granularity: GranularityName,
    tiebreakerId: string | null = null,
  ): Promise<VariantPayload> {
    const resp = await fetch(
      this.url(`/logs/${logId}/variants/${key}`, {
        granularity,
        tiebreaker_id: tiebreakerId,
      }),
    );
    return jsonOrThrow<VariantPayload>(resp);
  }

  async putTiebreaker(
    logId: string,
    edgeText: string,
    granularity: GranularityName,
  ): Promise<TiebreakerResult> {
    const resp = await fetch(this.url(`/logs/${logId}/tiebreaker`, { granularity }), {
      method: "PUT",
      headers: { "content-type": "text/plain" },
      body: edgeText,
    });
    if (resp.status === 409) {
      const body = (await resp.json()) as { conflicts: TiebreakerConflict[] };
      return { ok: false, conflicts: body.conflicts };
    }
    return { ok: true, accepted: await jsonOrThrow<TiebreakerAccepted>(resp) };
  }

  async sequentialize(logId: string, req: ExportRequest): Promise<ExportResult> {
    const resp = await fetch(this.url(`/logs/${logId}/sequentialize`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
    if (!resp.ok) {
      await jsonOrThrow(resp); // throws with detail
    }
    const disposition = resp.headers.get("content-disposition") ?? "";
    const match = disposition.match(/filename="([^"]+)"/);
    return {
      bytes: await resp.arrayBuffer(),
      filename: match ? match[1] : `export.${req.format}`,
      traceCount: Number(resp.headers.get("x-trace-count") ?? "0"),
    };
  }

  async granularities(
    logId: string,
    tiebreakerId: string | null = null,
  ): Promise<GranularitiesResponse> {
    const resp = await fetch(
      this.url(`/logs/${logId}/granularities`, { tiebreaker_id: tiebreakerId }),
    );
    return jsonOrThrow<GranularitiesResponse>(resp);
  }
}
