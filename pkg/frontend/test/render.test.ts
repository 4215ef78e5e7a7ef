import { describe, expect, it } from "vitest";

import { layoutCard, maxScroll, scrollToFocus, viewport } from "../src/render.js";
import { CardJson } from "../src/types.js";

const empty = { fields: {}, chosen: {} };

const MENU: CardJson = {
  id: "menu",
  title: "Museum Shop",
  nodes: [
    { type: "a", href: "/login", label: "1. Log in" },
    { type: "br" },
    { type: "a", href: "/register", label: "2. Register" },
    { type: "br" },
    { type: "a", href: "/new", label: "3. New arrivals" },
    { type: "do", kind: "prev", label: "Back", target: "back" },
    { type: "do", kind: "options", label: "Menu", target: "/menu" },
  ],
};

describe("layoutCard", () => {
  it("maps anchors to focusable numbered lines", () => {
    const layout = layoutCard(MENU, empty, 20);
    expect(layout.focusables.map((f) => f.menuNumber)).toEqual([1, 2, 3]);
    expect(layout.lines[layout.focusables[2].line]).toBe("3. New arrivals");
  });

  it("wraps long text to the column limit", () => {
    const card: CardJson = {
      id: "c", title: "", nodes: [
        { type: "text", text: "a quick brown fox jumped over the lazy museum dog" },
      ],
    };
    const layout = layoutCard(card, empty, 20);
    expect(layout.lines.length).toBeGreaterThan(1);
    for (const line of layout.lines) expect(line.length).toBeLessThanOrEqual(20);
  });

  it("masks password fields", () => {
    const card: CardJson = {
      id: "c", title: "", nodes: [{ type: "input", name: "p", kind: "password" }],
    };
    const layout = layoutCard(card, { fields: { p: "secret" }, chosen: {} }, 20);
    expect(layout.lines[0]).toBe("p:[******]");
  });

  it("renders tables and images inline", () => {
    const card: CardJson = {
      id: "c", title: "", nodes: [
        { type: "table", rows: [["Fossil Replica", "x2"]] },
        { type: "img", src: "/img/x.wbmp", alt: "logo" },
      ],
    };
    const layout = layoutCard(card, empty, 20);
    expect(layout.lines).toEqual(["Fossil Replica|x2", "(logo)"]);
  });
});

describe("viewport", () => {
  it("always emits rows lines of at most cols chars", () => {
    const layout = layoutCard(MENU, empty, 20);
    const view = viewport(layout, 0, 0, 8, 20);
    expect(view.grid.length).toBe(8);
    for (const line of view.grid) expect(line.length).toBeLessThanOrEqual(20);
  });

  it("marks the focused line", () => {
    const layout = layoutCard(MENU, empty, 20);
    const view = viewport(layout, 0, 1, 8, 20);
    expect(view.grid[1 + layout.focusables[1].line]).toBe(">2. Register");
  });

  it("shows the focused anchor on the softkey bar when no accept action", () => {
    const layout = layoutCard(MENU, empty, 20);
    const bar = viewport(layout, 0, 0, 8, 20).grid[7];
    expect(bar.startsWith("1. Log in")).toBe(true);
    expect(bar.endsWith("Menu|Back")).toBe(true);
  });

  it("keeps every interactive line reachable by scrolling", () => {
    const nodes = [] as CardJson["nodes"];
    for (let i = 1; i <= 12; i++) {
      nodes.push({ type: "a", href: `/x${i}`, label: `${i}. Item` });
      nodes.push({ type: "br" });
    }
    const layout = layoutCard({ id: "c", title: "Long", nodes }, empty, 20);
    let scroll = 0;
    for (let focus = 0; focus < layout.focusables.length; focus++) {
      scroll = scrollToFocus(layout, focus, scroll, 8);
      const view = viewport(layout, scroll, focus, 8, 20);
      const marked = view.grid.filter((l) => l.startsWith(">"));
      expect(marked).toHaveLength(1);
      expect(scroll).toBeLessThanOrEqual(maxScroll(layout, 8));
    }
  });
});
