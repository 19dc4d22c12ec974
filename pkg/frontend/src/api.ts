// Typed client for the gateway HTTP API. The fetch implementation is
// injectable so tests can run against a simulated gateway.

import type {
  ApiFailure,
  BankEntryJson,
  FeedbackResponse,
  PreviewResponse,
  SynthesizeRequest,
  SynthesizeResponse,
  ValueJson,
} from "./types.js";

export class GatewayError extends Error {
  readonly status: number;
  readonly diff?: unknown;

  constructor(failure: ApiFailure) {
    super(failure.error);
    this.status = failure.status;
    this.diff = failure.diff;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class GatewayClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, body?: unknown): Promise<T> {
    const init: RequestInit = body === undefined
      ? { method: "GET" }
      : {
          method: "POST",
          headers: { "Content-Type": "application/json" },
          body: JSON.stringify(body),
        };
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new GatewayError({ status: 0, error: `network failure: ${String(err)}` });
    }
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new GatewayError({
        status: response.status,
        error: typeof payload?.error === "string" ? payload.error : `HTTP ${response.status}`,
        diff: payload?.diff,
      });
    }
    return payload as T;
  }

  synthesize(req: SynthesizeRequest): Promise<SynthesizeResponse> {
    return this.request("/synthesize", req);
  }

  preview(code: string, env: Record<string, ValueJson>): Promise<PreviewResponse> {
    return this.request("/preview", { code, env });
  }

  feedback(resultId: string, code: string, query?: string): Promise<FeedbackResponse> {
    return this.request("/feedback", { result_id: resultId, code, query });
  }

  bankContext(): Promise<BankEntryJson[]> {
    return this.request("/bank/context");
  }

  bankRules(): Promise<unknown[]> {
    return this.request("/bank/rules");
  }

  health(): Promise<{ status: string; bank_size: number; rules: number }> {
    return this.request("/health");
  }
}
