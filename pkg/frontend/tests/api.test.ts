import { describe, expect, it } from "vitest";

import { GatewayClient, GatewayError } from "../src/api.js";
import { FakeGateway } from "./fake_gateway.js";

const TASK = {
  candidates: [
    {
      code: "dfout = df['country'].str.replace('Name:', '')",
      origin: "model" as const,
      status: "pass_io" as const,
      rank: 0, rule_id: null, error_kind: null,
    },
  ],
  correctCodes: ["dfout = df['country'].str.replace('Name:', '')"],
  previews: {
    "dfout = df['country'].str.replace('Name:', '')": {
      name: "country", index: [0, 1], values: ["France", "Peru"],
    },
  },
};

function client(gw: FakeGateway): GatewayClient {
  return new GatewayClient("http://gateway.test", gw.fetch);
}

describe("GatewayClient", () => {
  it("synthesizes and returns a result id", async () => {
    const gw = new FakeGateway({ q: TASK });
    const response = await client(gw).synthesize({
      query: "q", env: {}, output_name: "dfout",
    });
    expect(response.result_id).toMatch(/^r\d+$/);
    expect(response.candidates[0].status).toBe("pass_io");
  });

  it("maps error statuses to GatewayError with the body's message", async () => {
    const gw = new FakeGateway({});
    await expect(client(gw).synthesize({ query: "missing", env: {}, output_name: "o" }))
      .rejects.toMatchObject({ status: 502 });
    await expect(client(gw).feedback("nope", "x = 1"))
      .rejects.toMatchObject({ status: 404 });
  });

  it("carries the failing-example diff on 400", async () => {
    const gw = new FakeGateway({ q: TASK });
    const c = client(gw);
    const { result_id } = await c.synthesize({ query: "q", env: {}, output_name: "dfout" });
    try {
      await c.feedback(result_id, "dfout = wrong()");
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(GatewayError);
      expect((err as GatewayError).status).toBe(400);
      expect((err as GatewayError).diff).toMatchObject({ example: 0 });
    }
  });

  it("wraps network failures", async () => {
    const c = new GatewayClient("http://down.test", () => {
      throw new Error("connection refused");
    });
    await expect(c.health()).rejects.toMatchObject({ status: 0 });
  });

  it("reads the banks", async () => {
    const gw = new FakeGateway({ q: TASK });
    const c = client(gw);
    expect(await c.bankContext()).toEqual([]);
    const { result_id } = await c.synthesize({ query: "q", env: {}, output_name: "dfout" });
    await c.feedback(result_id, TASK.correctCodes[0]);
    expect((await c.bankContext()).length).toBe(1);
    expect((await c.health()).bank_size).toBe(1);
  });
});
