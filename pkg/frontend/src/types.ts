// Wire types for the gateway HTTP API.

export type Cell = number | string | boolean | null;

export interface TableJson {
  columns: string[];
  index: Cell[];
  data: Cell[][];
  dtypes?: string[];
}

export interface SeriesJson {
  name: string | null;
  index: Cell[];
  values: Cell[];
}

export type ValueJson =
  | TableJson
  | SeriesJson
  | { scalar: Cell }
  | { list: ValueJson[] }
  | { dict: [Cell, ValueJson][] };

export type CandidateStatus =
  | "pass_io"
  | "fail_io"
  | "runtime_error"
  | "parse_error"
  | "unchecked";

export type CandidateOrigin = "model" | "varfix" | "argfix" | "rewrite";

export interface CandidateJson {
  code: string;
  origin: CandidateOrigin;
  status: CandidateStatus;
  rank: number;
  rule_id: string | null;
  error_kind: string | null;
}

export interface SynthesizeRequest {
  query: string;
  env: Record<string, ValueJson>;
  output_name: string;
  expected?: ValueJson;
  temperature?: number;
  k?: number;
}

export interface SynthesizeResponse {
  result_id: string;
  query: string;
  stage_reached: string;
  unchecked: boolean;
  transport_error: string | null;
  timings: Record<string, number>;
  candidates: CandidateJson[];
}

export interface PreviewResponse {
  value?: ValueJson | null;
  output_name?: string | null;
  error?: { kind: string; message: string; line?: number; col?: number };
}

export interface FeedbackResponse {
  bank_added: boolean;
  pairs_harvested: number;
  clusters_total: number;
  bank_size: number;
}

export interface BankEntryJson {
  q: string;
  code: string;
  source: string;
  ts: number;
}

export interface ApiFailure {
  status: number;
  error: string;
  diff?: unknown;
}

export function isTable(v: ValueJson | null | undefined): v is TableJson {
  return !!v && typeof v === "object" && "columns" in v && "data" in v;
}

export function isSeries(v: ValueJson | null | undefined): v is SeriesJson {
  return !!v && typeof v === "object" && "values" in v && !("columns" in v);
}
