// Thin DOM layer: renders a CardState and wires events back into the
// pure card functions. State is recreated from scratch on every render
// so a reload (or replaying server responses) reproduces the UI.

import { GatewayClient } from "./api.js";
import {
  CardState, editCopy, feedbackEnabled, newCard, previewEdited,
  selectCandidate, setEditedCode, submitFeedback, submitQuery,
} from "./card.js";
import {
  Grid, addColumn, addRow, formatValue, gridFromCsv, renameColumn, setCell,
} from "./table.js";

const STATUS_BADGES: Record<string, string> = {
  pass_io: "PASS",
  fail_io: "fail",
  runtime_error: "error",
  parse_error: "parse",
  unchecked: "unchecked",
};

export class Workbench {
  private card: CardState = newCard();

  constructor(
    private readonly root: HTMLElement,
    private readonly client: GatewayClient,
  ) {
    this.render();
  }

  private async update(next: CardState | Promise<CardState>): Promise<void> {
    this.card = await next;
    this.render();
  }

  private gridEditor(name: string, grid: Grid, apply: (g: Grid) => void): HTMLElement {
    const wrap = el("div", "grid-editor");
    wrap.appendChild(el("h3", "", name));
    const table = document.createElement("table");
    const head = document.createElement("tr");
    grid.columns.forEach((col, j) => {
      const th = document.createElement("th");
      const input = document.createElement("input");
      input.value = col;
      input.addEventListener("change", () => apply(renameColumn(grid, j, input.value)));
      th.appendChild(input);
      head.appendChild(th);
    });
    table.appendChild(head);
    grid.rows.forEach((row, i) => {
      const tr = document.createElement("tr");
      row.forEach((cell, j) => {
        const td = document.createElement("td");
        const input = document.createElement("input");
        input.value = cell === null ? "" : String(cell);
        input.addEventListener("change", () => apply(setCell(grid, i, j, input.value)));
        td.appendChild(input);
        tr.appendChild(td);
      });
      table.appendChild(tr);
    });
    wrap.appendChild(table);
    const controls = el("div", "grid-controls");
    controls.appendChild(button("+ row", () => apply(addRow(grid))));
    controls.appendChild(button("+ column", () => apply(addColumn(grid))));
    const paste = document.createElement("textarea");
    paste.placeholder = "paste CSV here (first line = header)";
    paste.addEventListener("paste", (event) => {
      const text = event.clipboardData?.getData("text");
      if (text && text.includes("\n")) {
        event.preventDefault();
        apply(gridFromCsv(text));
      }
    });
    controls.appendChild(paste);
    wrap.appendChild(controls);
    return wrap;
  }

  render(): void {
    const card = this.card;
    this.root.textContent = "";
    const panel = el("div", "card");

    if (card.banner) {
      const banner = el("div", "banner", card.banner);
      banner.appendChild(button("retry", () => this.update(submitQuery(card, this.client))));
      panel.appendChild(banner);
    }
    if (card.toast) {
      panel.appendChild(el("div", `toast toast-${card.toast.kind}`, card.toast.message));
    }

    const queryRow = el("div", "query-row");
    const queryInput = document.createElement("input");
    queryInput.className = "query";
    queryInput.placeholder = "describe the transformation…";
    queryInput.value = card.query;
    queryInput.addEventListener("input", () => {
      this.card = { ...this.card, query: queryInput.value };
    });
    queryRow.appendChild(queryInput);
    queryRow.appendChild(button(card.busy ? "…" : "synthesize", () =>
      this.update(submitQuery(this.card, this.client))));
    panel.appendChild(queryRow);

    const grids = el("div", "grids");
    grids.appendChild(this.gridEditor(`input (${card.inputName})`, card.inputGrid,
      (g) => this.update({ ...this.card, inputGrid: g })));
    grids.appendChild(this.gridEditor(`expected output (${card.outputName})`, card.outputGrid,
      (g) => this.update({ ...this.card, outputGrid: g })));
    panel.appendChild(grids);

    if (card.candidates.length > 0) {
      const list = el("div", "candidates");
      list.appendChild(el("h3", "", `candidates (stage: ${card.stageReached})`));
      card.candidates.forEach((c, i) => {
        const row = el("div", "candidate" + (card.selected === i ? " selected" : ""));
        row.appendChild(el("span", `badge badge-${c.status}`, STATUS_BADGES[c.status] ?? c.status));
        row.appendChild(el("span", "origin", c.origin));
        const code = el("code", "", c.code);
        row.appendChild(code);
        row.addEventListener("click", () => this.update(selectCandidate(this.card, i)));
        if (card.selected === i) {
          const preview = el("pre", "preview",
            c.previewError ? `preview error — ${c.previewError}` : formatValue(c.preview));
          row.appendChild(preview);
        }
        list.appendChild(row);
      });
      panel.appendChild(list);

      const actions = el("div", "actions");
      actions.appendChild(button("edit a copy", () => this.update(editCopy(this.card))));
      if (card.editedCode !== null) {
        const editor = document.createElement("textarea");
        editor.className = "editor";
        editor.value = card.editedCode;
        editor.addEventListener("input", () => {
          this.card = setEditedCode(this.card, editor.value);
        });
        actions.appendChild(editor);
        actions.appendChild(button("preview edit", () =>
          this.update(previewEdited(this.card, this.client))));
        const submit = button("submit feedback", () =>
          this.update(submitFeedback(this.card, this.client)));
        submit.disabled = !feedbackEnabled(card);
        actions.appendChild(submit);
        if (card.editedDiff) {
          actions.appendChild(el("pre", "diff", card.editedDiff));
        }
      }
      panel.appendChild(actions);
    }

    this.root.appendChild(panel);
  }
}

function el(tag: string, className = "", text = ""): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function button(label: string, onClick: () => void): HTMLButtonElement {
  const b = document.createElement("button");
  b.textContent = label;
  b.addEventListener("click", onClick);
  return b;
}
