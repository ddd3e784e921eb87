// Payload shapes of the ordlog HTTP service (schema_version 1).

export type GranularityName =
  | "millisecond"
  | "second"
  | "minute"
  | "hour"
  | "day"
  | "week"
  | "month"
  | "year";

export const GRANULARITIES: GranularityName[] = [
  "millisecond",
  "second",
  "minute",
  "hour",
  "day",
  "week",
  "month",
  "year",
];

export interface LogSummary {
  events: number;
  cases: number;
  activities: number;
  order_pairs: number;
  consistent: boolean;
}

export interface UploadResponse {
  schema_version: number;
  log_id: string;
  summary: LogSummary;
}

export interface VariantNode {
  idx: number;
  activity: string;
}

export interface VariantPayload {
  canonical_key: string;
  frequency: number;
  case_ids: string[];
  nodes: VariantNode[];
  hasse_edges: [number, number][];
}

export interface VariantListResponse {
  schema_version: number;
  granularity: GranularityName;
  tiebreaker_id: string | null;
  total_variants: number;
  total_cases: number;
  page: number;
  page_size: number;
  variants: VariantPayload[];
}

export interface ConsistencyViolation {
  first_id: string;
  second_id: string;
  first_time: number;
  second_time: number;
}

export interface ConsistencyResponse {
  schema_version: number;
  consistent: boolean;
  time_constrained: boolean;
  order_constrained: boolean;
  violations: ConsistencyViolation[];
  violations_truncated: boolean;
}

export interface TiebreakerConflict {
  first_id: string;
  second_id: string;
  first_activity: string;
  second_activity: string;
  contradicts: string;
}

export interface TiebreakerAccepted {
  schema_version: number;
  tiebreaker_id: string;
  pairs: [string, string][];
  conflicts: [];
}

export interface LevelCount {
  granularity: GranularityName;
  variant_count: number;
}

export interface GranularitiesResponse {
  schema_version: number;
  levels: LevelCount[];
}

export interface IngestConfigPayload {
  format?: "csv" | "xes";
  column_map?: {
    case?: string;
    activity?: string;
    timestamp?: string;
    id?: string | null;
  };
  explicit_order_source?: string;
  timezone?: string;
  delimiter?: string;
}
