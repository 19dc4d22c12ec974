// Editable grid model: a small immutable table with CSV paste-import,
// capped at 50x20 cells so example frames stay example-sized.

import type { Cell, TableJson, ValueJson } from "./types.js";
import { isSeries, isTable } from "./types.js";

export const MAX_ROWS = 50;
export const MAX_COLS = 20;

export interface Grid {
  columns: string[];
  rows: Cell[][];
}

export function emptyGrid(): Grid {
  return { columns: ["col1"], rows: [[null]] };
}

export function parseCell(text: string): Cell {
  const trimmed = text.trim();
  if (trimmed === "" || trimmed.toLowerCase() === "null") return null;
  if (trimmed === "True" || trimmed.toLowerCase() === "true") return true;
  if (trimmed === "False" || trimmed.toLowerCase() === "false") return false;
  if (/^-?\d+$/.test(trimmed)) return parseInt(trimmed, 10);
  if (/^-?\d*\.\d+(e-?\d+)?$/i.test(trimmed)) return parseFloat(trimmed);
  return trimmed;
}

function splitCsvLine(line: string): string[] {
  const out: string[] = [];
  let field = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"' && line[i + 1] === '"') {
        field += '"';
        i++;
      } else if (ch === '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch === '"') {
      quoted = true;
    } else if (ch === "," || ch === "\t") {
      out.push(field);
      field = "";
    } else {
      field += ch;
    }
  }
  out.push(field);
  return out;
}

/** Parse pasted CSV/TSV text (first line is the header) into a grid,
 * enforcing the size cap. */
export function gridFromCsv(text: string): Grid {
  const lines = text.replace(/\r\n/g, "\n").split("\n").filter((l) => l.trim() !== "");
  if (lines.length === 0) return emptyGrid();
  const header = splitCsvLine(lines[0]).map((h, i) => h.trim() || `col${i + 1}`);
  const columns = header.slice(0, MAX_COLS);
  const rows: Cell[][] = [];
  for (const line of lines.slice(1, MAX_ROWS + 1)) {
    const cells = splitCsvLine(line).slice(0, columns.length).map(parseCell);
    while (cells.length < columns.length) cells.push(null);
    rows.push(cells);
  }
  return { columns, rows };
}

export function gridToTableJson(grid: Grid): TableJson {
  return {
    columns: [...grid.columns],
    index: grid.rows.map((_, i) => i),
    data: grid.rows.map((row) => [...row]),
  };
}

export function gridFromValue(value: ValueJson): Grid {
  if (isTable(value)) {
    return {
      columns: [...value.columns],
      rows: value.data.map((row) => [...row]),
    };
  }
  if (isSeries(value)) {
    const name = value.name ?? "value";
    return { columns: [name], rows: value.values.map((v) => [v]) };
  }
  if (value && typeof value === "object" && "scalar" in value) {
    return { columns: ["value"], rows: [[value.scalar]] };
  }
  return { columns: ["value"], rows: [[JSON.stringify(value)]] };
}

export function setCell(grid: Grid, row: number, col: number, text: string): Grid {
  const rows = grid.rows.map((r) => [...r]);
  if (row >= 0 && row < rows.length && col >= 0 && col < grid.columns.length) {
    rows[row][col] = parseCell(text);
  }
  return { columns: [...grid.columns], rows };
}

export function addRow(grid: Grid): Grid {
  if (grid.rows.length >= MAX_ROWS) return grid;
  return {
    columns: [...grid.columns],
    rows: [...grid.rows.map((r) => [...r]), grid.columns.map(() => null)],
  };
}

export function addColumn(grid: Grid, name?: string): Grid {
  if (grid.columns.length >= MAX_COLS) return grid;
  return {
    columns: [...grid.columns, name ?? `col${grid.columns.length + 1}`],
    rows: grid.rows.map((r) => [...r, null]),
  };
}

export function renameColumn(grid: Grid, col: number, name: string): Grid {
  const columns = [...grid.columns];
  if (col >= 0 && col < columns.length && name.trim()) columns[col] = name.trim();
  return { columns, rows: grid.rows.map((r) => [...r]) };
}

/** Render a value (table, series or scalar) as compact preview text. */
export function formatValue(value: ValueJson | null | undefined): string {
  if (value === null || value === undefined) return "(no value)";
  const grid = gridFromValue(value);
  const header = grid.columns.join(" | ");
  const body = grid.rows
    .slice(0, 8)
    .map((row) => row.map((c) => (c === null ? "·" : String(c))).join(" | "))
    .join("\n");
  const more = grid.rows.length > 8 ? `\n… ${grid.rows.length - 8} more rows` : "";
  return `${header}\n${body}${more}`;
}
