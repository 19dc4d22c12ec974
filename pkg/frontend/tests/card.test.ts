// Workbench card flows against the simulated gateway, including the
// acceptance behaviors: candidates render pass-first for the
// strip-the-prefix query, and a corrected snippet grows the context
// bank by exactly one entry while reporting harvested edit pairs.

import { beforeEach, describe, expect, it } from "vitest";

import { GatewayClient } from "../src/api.js";
import {
  CardState, editCopy, feedbackEnabled, newCard, previewEdited,
  selectCandidate, setEditedCode, submitFeedback, submitQuery,
} from "../src/card.js";
import { gridFromCsv } from "../src/table.js";
import { FakeGateway } from "./fake_gateway.js";

const QUERY = "Remove substring 'Name:' from column 'country' of df";
const CORRECT = "dfout = df['country'].str.replace('Name:', '')";
const WRONG = "df = df.country.str.remove('Name:')";

const PREVIEW_SERIES = { name: "country", index: [0, 1], values: ["France", "Peru"] };

function makeGateway(): FakeGateway {
  return new FakeGateway({
    [QUERY]: {
      candidates: [
        { code: WRONG, origin: "model", status: "runtime_error", rank: 0, rule_id: null, error_kind: "unknown_member" },
        { code: CORRECT, origin: "varfix", status: "pass_io", rank: 0, rule_id: null, error_kind: null },
      ],
      correctCodes: [CORRECT],
      previews: { [CORRECT]: PREVIEW_SERIES },
    },
  });
}

function makeCard(): CardState {
  const card = newCard();
  return {
    ...card,
    query: QUERY,
    inputGrid: gridFromCsv("country\nName:France\nName:Peru"),
    outputGrid: gridFromCsv("country\nFrance\nPeru"),
  };
}

let gw: FakeGateway;
let client: GatewayClient;

beforeEach(() => {
  gw = makeGateway();
  client = new GatewayClient("http://gateway.test", gw.fetch);
});

describe("submit_query", () => {
  it("renders candidates pass-first with origin labels and previews", async () => {
    const card = await submitQuery(makeCard(), client);
    expect(card.banner).toBeNull();
    expect(card.resultId).not.toBeNull();
    expect(card.candidates.length).toBe(2);
    expect(card.candidates[0].status).toBe("pass_io");
    expect(card.candidates[0].origin).toBe("varfix");
    expect(card.candidates[0].preview).toEqual(PREVIEW_SERIES);
    expect(card.candidates[1].status).toBe("runtime_error");
    expect(card.candidates[1].previewError).not.toBeNull();
    const ranks = card.candidates.map((c) => (c.status === "pass_io" ? 0 : 1));
    expect(ranks).toEqual([...ranks].sort());
  });

  it("validates client-side and sends no request for an empty query", async () => {
    const card = await submitQuery({ ...makeCard(), query: "  " }, client);
    expect(card.toast?.kind).toBe("error");
    expect(gw.requests.length).toBe(0);
  });

  it("keeps the card and shows a retriable banner on transport failure", async () => {
    const broken = new GatewayClient("http://gateway.test", () => {
      throw new Error("connection refused");
    });
    const before = makeCard();
    const card = await submitQuery(before, broken);
    expect(card.banner).toContain("retry");
    expect(card.query).toBe(before.query);
    expect(card.inputGrid).toEqual(before.inputGrid);
  });
});

describe("submit_feedback", () => {
  async function cardWithEdit(code: string): Promise<CardState> {
    let card = await submitQuery(makeCard(), client);
    card = selectCandidate(card, 1); // start from the failing model answer
    card = editCopy(card);
    expect(card.editedCode).toBe(WRONG);
    card = setEditedCode(card, code);
    return card;
  }

  it("is gated on a successful preview of the edited code", async () => {
    let card = await cardWithEdit(CORRECT);
    expect(feedbackEnabled(card)).toBe(false);
    card = await submitFeedback(card, client);
    expect(card.toast?.kind).toBe("error"); // nudges to preview first
    card = await previewEdited(card, client);
    expect(card.editedPreviewOk).toBe(true);
    expect(feedbackEnabled(card)).toBe(true);
  });

  it("grows the bank by exactly one entry and reports harvested pairs", async () => {
    let card = await cardWithEdit(CORRECT);
    card = await previewEdited(card, client);
    const before = (await client.bankContext()).length;
    card = await submitFeedback(card, client);
    const after = await client.bankContext();
    expect(after.length).toBe(before + 1);
    expect(after[after.length - 1].q).toBe(QUERY);
    expect(card.toast?.kind).toBe("success");
    expect(card.toast?.message).toMatch(/1 edit pair\(s\) harvested/);
    expect(card.toast?.message).toContain("bank grew");
  });

  it("reports an unchanged bank for a duplicate query", async () => {
    let card = await cardWithEdit(CORRECT);
    card = await previewEdited(card, client);
    card = await submitFeedback(card, client);
    // resubmit the same fix from a fresh result for the same query
    let again = await cardWithEdit(CORRECT);
    again = await previewEdited(again, client);
    again = await submitFeedback(again, client);
    expect((await client.bankContext()).length).toBe(1);
    expect(again.toast?.message).toContain("bank unchanged (similar query exists)");
  });

  it("shows the failing diff inline on a rejected edit and mutates nothing", async () => {
    let card = await cardWithEdit("dfout = df['country'].str.replace('Name:', 'X')");
    // the fake previews unknown snippets as errors, so force the gate
    // open to exercise the server-side rejection path
    card = { ...card, editedPreviewOk: true };
    card = await submitFeedback(card, client);
    expect(card.editedDiff).not.toBeNull();
    expect(card.toast?.kind).toBe("error");
    expect((await client.bankContext()).length).toBe(0);
  });

  it("only feedback mutates server state", async () => {
    let card = await submitQuery(makeCard(), client);
    card = selectCandidate(card, 0);
    await previewEdited(editCopy(card), client);
    expect((await client.bankContext()).length).toBe(0);
    expect(gw.rules.length).toBe(0);
  });
});
