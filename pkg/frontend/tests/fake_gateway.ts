// In-memory gateway double implementing the documented HTTP contract at
// the fetch level: ranked candidates with a result_id ring, preview by
// lookup, feedback that validates the code, grows the bank once per
// novel query and harvests edit pairs from failing candidates.

import type { FetchLike } from "../src/api.js";
import type {
  BankEntryJson, CandidateJson, SynthesizeResponse, ValueJson,
} from "../src/types.js";

export interface FakeTask {
  candidates: CandidateJson[];
  correctCodes: string[];
  previews: Record<string, ValueJson>;
}

const STATUS_RANK: Record<string, number> = {
  pass_io: 0, unchecked: 1, fail_io: 2, runtime_error: 3, parse_error: 4,
};

export class FakeGateway {
  bank: BankEntryJson[] = [];
  rules: unknown[] = [];
  requests: string[] = [];
  private results = new Map<string, { query: string; task: FakeTask }>();
  private counter = 0;

  constructor(private readonly tasks: Record<string, FakeTask>) {}

  get fetch(): FetchLike {
    return async (url, init) => {
      const path = new URL(url).pathname;
      this.requests.push(path);
      const body = init?.body ? JSON.parse(String(init.body)) : {};
      try {
        return this.route(path, init?.method ?? "GET", body);
      } catch (err) {
        return json(500, { error: String(err) });
      }
    };
  }

  private route(path: string, method: string, body: any): Response {
    if (method === "GET" && path === "/health") {
      return json(200, { status: "ok", bank_size: this.bank.length, rules: this.rules.length });
    }
    if (method === "GET" && path === "/bank/context") return json(200, this.bank);
    if (method === "GET" && path === "/bank/rules") return json(200, this.rules);
    if (path === "/synthesize") return this.synthesize(body);
    if (path === "/preview") return this.preview(body);
    if (path === "/feedback") return this.feedback(body);
    return json(404, { error: "not found" });
  }

  private synthesize(body: any): Response {
    if (!body.query || typeof body.query !== "string") {
      return json(400, { error: "missing query" });
    }
    const task = this.tasks[body.query];
    if (!task) return json(502, { error: "mock model has no answer" });
    this.counter += 1;
    const resultId = `r${String(this.counter).padStart(6, "0")}`;
    this.results.set(resultId, { query: body.query, task });
    const ranked = [...task.candidates].sort(
      (a, b) => STATUS_RANK[a.status] - STATUS_RANK[b.status] || a.rank - b.rank,
    );
    const payload: SynthesizeResponse = {
      result_id: resultId,
      query: body.query,
      stage_reached: "model",
      unchecked: false,
      transport_error: null,
      timings: { model: 0.01 },
      candidates: ranked,
    };
    return json(200, payload);
  }

  private preview(body: any): Response {
    if (!body.code) return json(400, { error: "missing code" });
    for (const task of Object.values(this.tasks)) {
      if (body.code in task.previews) {
        return json(200, { value: task.previews[body.code], output_name: "dfout" });
      }
    }
    return json(200, {
      error: { kind: "parse_error", message: "unknown snippet", line: 1, col: 1 },
    });
  }

  private feedback(body: any): Response {
    if (!body.result_id || !body.code) {
      return json(400, { error: "feedback needs result_id and code" });
    }
    const remembered = this.results.get(body.result_id);
    if (!remembered) return json(404, { error: `unknown result_id '${body.result_id}'` });
    const { query, task } = remembered;
    if (!task.correctCodes.includes(body.code)) {
      return json(400, {
        error: "example 0: output mismatch",
        diff: { example: 0, expected: "…", got: "…" },
      });
    }
    const similar = this.bank.some((e) => e.q === (body.query ?? query));
    let added = false;
    if (!similar) {
      this.bank.push({
        q: body.query ?? query, code: body.code,
        source: "feedback", ts: this.bank.length + 1,
      });
      added = true;
    }
    const failing = task.candidates.filter((c) => c.status !== "pass_io" && c.status !== "parse_error");
    if (failing.length > 0 && this.rules.length === 0) {
      this.rules.push({ id: "r0", support: failing.length });
    }
    return json(200, {
      bank_added: added,
      pairs_harvested: failing.length,
      clusters_total: this.rules.length,
      bank_size: this.bank.length,
    });
  }
}

function json(status: number, payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
