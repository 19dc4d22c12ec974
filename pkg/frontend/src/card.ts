// Session card state machine: one query + I/O tables + candidate list.
// Pure logic over the gateway client; the DOM layer just renders state.
// Nothing here mutates the server except submitFeedback.

import { GatewayClient, GatewayError } from "./api.js";
import {
  Grid, emptyGrid, gridToTableJson,
} from "./table.js";
import type {
  CandidateJson, PreviewResponse, SynthesizeResponse, ValueJson,
} from "./types.js";

export interface CandidateView {
  code: string;
  origin: string;
  status: string;
  preview: ValueJson | null;
  previewError: string | null;
}

export interface Toast {
  kind: "info" | "success" | "error";
  message: string;
}

export interface CardState {
  query: string;
  inputName: string;
  outputName: string;
  inputGrid: Grid;
  outputGrid: Grid;
  busy: boolean;
  banner: string | null; // retriable transport/server failure
  toast: Toast | null;
  resultId: string | null;
  stageReached: string | null;
  candidates: CandidateView[];
  selected: number | null;
  editedCode: string | null; // set by "edit a copy"
  editedPreviewOk: boolean;
  editedDiff: string | null; // inline failing-example diff from a 400
}

export function newCard(): CardState {
  return {
    query: "",
    inputName: "df",
    outputName: "dfout",
    inputGrid: emptyGrid(),
    outputGrid: emptyGrid(),
    busy: false,
    banner: null,
    toast: null,
    resultId: null,
    stageReached: null,
    candidates: [],
    selected: null,
    editedCode: null,
    editedPreviewOk: false,
    editedDiff: null,
  };
}

export function validateCard(card: CardState): string | null {
  if (!card.query.trim()) return "enter a query first";
  if (!card.inputName.trim() || !/^[A-Za-z_]\w*$/.test(card.inputName)) {
    return "input table needs a valid variable name";
  }
  if (card.inputGrid.columns.length === 0) return "input table is empty";
  return null;
}

function env(card: CardState): Record<string, ValueJson> {
  return { [card.inputName]: gridToTableJson(card.inputGrid) };
}

/** Submit the card's query and tables; renders candidates pass-first
 * (the gateway already ranks them) with a per-candidate output preview. */
export async function submitQuery(
  card: CardState,
  client: GatewayClient,
): Promise<CardState> {
  const problem = validateCard(card);
  if (problem) {
    return { ...card, toast: { kind: "error", message: problem } };
  }
  let response: SynthesizeResponse;
  try {
    response = await client.synthesize({
      query: card.query,
      env: env(card),
      output_name: card.outputName,
      expected: gridToTableJson(card.outputGrid),
    });
  } catch (err) {
    const message = err instanceof GatewayError
      ? `synthesis failed (${err.status || "network"}): ${err.message}`
      : `synthesis failed: ${String(err)}`;
    // keep the card as it was so the user can simply retry
    return { ...card, busy: false, banner: `${message} — retry` };
  }
  const next: CardState = {
    ...card, busy: true, banner: null, toast: null,
    candidates: [], resultId: null, selected: null,
    editedCode: null, editedPreviewOk: false, editedDiff: null,
  };
  const candidates: CandidateView[] = [];
  for (const c of response.candidates) {
    candidates.push(await previewCandidate(c, card, client));
  }
  return {
    ...next,
    busy: false,
    resultId: response.result_id,
    stageReached: response.stage_reached,
    candidates,
    selected: candidates.length > 0 ? 0 : null,
  };
}

async function previewCandidate(
  c: CandidateJson,
  card: CardState,
  client: GatewayClient,
): Promise<CandidateView> {
  let preview: PreviewResponse = {};
  try {
    preview = await client.preview(c.code, env(card));
  } catch (err) {
    preview = { error: { kind: "transport", message: String(err) } };
  }
  return {
    code: c.code,
    origin: c.origin,
    status: c.status,
    preview: preview.error ? null : preview.value ?? null,
    previewError: preview.error ? `${preview.error.kind}: ${preview.error.message}` : null,
  };
}

export function selectCandidate(card: CardState, index: number): CardState {
  if (index < 0 || index >= card.candidates.length) return card;
  return { ...card, selected: index, editedCode: null, editedPreviewOk: false, editedDiff: null };
}

/** Candidate code is read-only; edits always go through an explicit
 * copy so the attribution to the original list stays clean. */
export function editCopy(card: CardState): CardState {
  if (card.selected === null) return card;
  return {
    ...card,
    editedCode: card.candidates[card.selected].code,
    editedPreviewOk: false,
    editedDiff: null,
  };
}

export function setEditedCode(card: CardState, code: string): CardState {
  return { ...card, editedCode: code, editedPreviewOk: false, editedDiff: null };
}

/** Run the edited code against the card's input; feedback submission
 * unlocks only when this preview succeeds. */
export async function previewEdited(
  card: CardState,
  client: GatewayClient,
): Promise<CardState> {
  if (card.editedCode === null) return card;
  try {
    const preview = await client.preview(card.editedCode, env(card));
    if (preview.error) {
      return {
        ...card,
        editedPreviewOk: false,
        toast: { kind: "error", message: `preview failed — ${preview.error.kind}: ${preview.error.message}` },
      };
    }
    return { ...card, editedPreviewOk: true, toast: null };
  } catch (err) {
    return { ...card, editedPreviewOk: false, banner: `preview failed: ${String(err)} — retry` };
  }
}

export function feedbackEnabled(card: CardState): boolean {
  return card.resultId !== null && card.editedCode !== null && card.editedPreviewOk;
}

/** Post the edited code as feedback; the toast reports whether the
 * context bank grew and how many edit pairs were harvested. */
export async function submitFeedback(
  card: CardState,
  client: GatewayClient,
): Promise<CardState> {
  if (!feedbackEnabled(card)) {
    return { ...card, toast: { kind: "error", message: "preview the edited code first" } };
  }
  try {
    const outcome = await client.feedback(card.resultId!, card.editedCode!, card.query);
    const bankNote = outcome.bank_added
      ? `bank grew to ${outcome.bank_size} entries`
      : "bank unchanged (similar query exists)";
    const pairNote = outcome.pairs_harvested > 0
      ? `${outcome.pairs_harvested} edit pair(s) harvested`
      : "no edit pairs harvested";
    return {
      ...card,
      editedDiff: null,
      toast: { kind: "success", message: `${bankNote}; ${pairNote}` },
    };
  } catch (err) {
    if (err instanceof GatewayError && err.status === 400) {
      return {
        ...card,
        editedDiff: err.diff ? JSON.stringify(err.diff, null, 1) : err.message,
        toast: { kind: "error", message: `feedback rejected: ${err.message}` },
      };
    }
    return { ...card, banner: `feedback failed: ${String(err)} — retry` };
  }
}
