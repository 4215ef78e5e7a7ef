/**
 * Fixed-cell renderer: a card becomes at most `rows` lines of at most
 * `cols` characters.  Interactive nodes map to focusable lines; content
 * that does not fit is reached by scrolling, never clipped away.
 *
 * Row layout: title bar, rows-2 content lines, softkey bar.
 */

import { CardJson, NodeJson } from "./types.js";

export interface Focusable {
  line: number;
  node: NodeJson;
  /** Numeric prefix of a numbered menu label ("3. Search" -> 3). */
  menuNumber?: number;
}

export interface DoButton {
  kind: "accept" | "prev" | "options";
  label: string;
  target: string;
}

export interface CardLayout {
  title: string;
  lines: string[];
  focusables: Focusable[];
  dos: DoButton[];
}

export interface FormState {
  fields: Record<string, string>;
  chosen: Record<string, number>; // select name -> option index
}

function wrap(text: string, cols: number): string[] {
  const out: string[] = [];
  for (const raw of text.split("\n")) {
    let line = "";
    for (const word of raw.split(/\s+/).filter((w) => w.length > 0)) {
      let rest = word;
      while (rest.length > cols) {
        if (line) {
          out.push(line);
          line = "";
        }
        out.push(rest.slice(0, cols));
        rest = rest.slice(cols);
      }
      if (!line) line = rest;
      else if (line.length + 1 + rest.length <= cols) line += " " + rest;
      else {
        out.push(line);
        line = rest;
      }
    }
    out.push(line);
  }
  while (out.length > 1 && out[out.length - 1] === "") out.pop();
  return out;
}

const clip = (s: string, cols: number) => (s.length <= cols ? s : s.slice(0, cols));

export function layoutCard(card: CardJson, form: FormState, totalCols: number): CardLayout {
  const cols = totalCols - 1; // first column is reserved for the focus marker
  const lines: string[] = [];
  const focusables: Focusable[] = [];
  const dos: DoButton[] = [];

  const walk = (nodes: NodeJson[]) => {
    for (const node of nodes) {
      switch (node.type) {
        case "text":
          lines.push(...wrap(node.text, cols));
          break;
        case "p":
          walk(node.children);
          break;
        case "br":
          lines.push("");
          break;
        case "a": {
          const label = node.label || node.href;
          const match = /^(\d+)\./.exec(label);
          focusables.push({
            line: lines.length,
            node,
            menuNumber: match ? parseInt(match[1], 10) : undefined,
          });
          lines.push(clip(label, cols));
          break;
        }
        case "do":
          dos.push({ kind: node.kind, label: node.label, target: node.target });
          break;
        case "input": {
          const value = form.fields[node.name] ?? "";
          const shown = node.kind === "password" ? "*".repeat(value.length) : value;
          focusables.push({ line: lines.length, node });
          lines.push(clip(`${node.name}:[${shown}]`, cols));
          break;
        }
        case "select": {
          const index = form.chosen[node.name] ?? 0;
          const option = node.options[index];
          focusables.push({ line: lines.length, node });
          lines.push(clip(`${node.name}:<${option ? option.label : ""}>`, cols));
          break;
        }
        case "table":
          for (const row of node.rows) lines.push(clip(row.join("|"), cols));
          break;
        case "img":
          lines.push(clip(`(${node.alt})`, cols));
          break;
        case "postfield":
          break;
      }
    }
  };
  walk(card.nodes);
  if (lines.length === 0) lines.push("");
  return { title: clip(card.title || card.id, cols), lines, focusables, dos };
}

export interface Viewport {
  grid: string[]; // exactly rows lines, each <= cols chars
  contentRows: number;
}

/** Softkey bar: accept action (or the focused link) left, Back/Menu right. */
function softkeyBar(layout: CardLayout, focus: number, cols: number): string {
  const accept = layout.dos.find((d) => d.kind === "accept");
  let left = accept ? accept.label || "OK" : "";
  if (!left) {
    const focused = layout.focusables[focus];
    if (focused && focused.node.type === "a") {
      left = focused.node.label || "Go";
    }
  }
  const right = "Menu|Back";
  const pad = Math.max(1, cols - left.length - right.length);
  return clip(`${left}${" ".repeat(pad)}${right}`, cols);
}

export function viewport(
  layout: CardLayout,
  scroll: number,
  focus: number,
  rows: number,
  cols: number,
): Viewport {
  const contentRows = rows - 2;
  const focusLine = layout.focusables[focus]?.line ?? -1;
  const grid: string[] = [clip(`[${layout.title}]`, cols)];
  for (let i = 0; i < contentRows; i++) {
    const lineNo = scroll + i;
    const text = layout.lines[lineNo] ?? "";
    const marker = lineNo === focusLine ? ">" : " ";
    grid.push(clip(marker + text, cols));
  }
  grid.push(softkeyBar(layout, focus, cols));
  return { grid, contentRows };
}

/** Smallest scroll that keeps the focused line inside the content window. */
export function scrollToFocus(layout: CardLayout, focus: number, scroll: number, rows: number): number {
  const focused = layout.focusables[focus];
  if (!focused) return scroll;
  const contentRows = rows - 2;
  if (focused.line < scroll) return focused.line;
  if (focused.line >= scroll + contentRows) return focused.line - contentRows + 1;
  return scroll;
}

export function maxScroll(layout: CardLayout, rows: number): number {
  return Math.max(0, layout.lines.length - (rows - 2));
}
