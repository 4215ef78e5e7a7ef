/**
 * Micro-browser state machine.  Holds no commerce state: everything a
 * page shows round-trips through the gateway; the session rides in the
 * URL.  History is a stack of (url, card) frames with their cached
 * decks; when the frames outgrow the device memory budget the oldest
 * are dropped and a counter makes the loss visible.
 */

import {
  CardLayout, DoButton, FormState, layoutCard, maxScroll, scrollToFocus, viewport,
} from "./render.js";
import { CardJson, DeckJson, DeviceProfile, MetricsJson, PHONE, Transport } from "./types.js";

export type Key =
  | "0" | "1" | "2" | "3" | "4" | "5" | "6" | "7" | "8" | "9"
  | "up" | "down" | "accept" | "options" | "back";

export interface HistoryFrame {
  url: string;
  cardId: string;
  deck: DeckJson;
}

export interface OverlayItem {
  label: string;
  target: string;
  submit: boolean; // form submission rather than plain navigation
}

/** Asks the user for a field value; null means cancelled. */
export type Prompter = (name: string, current: string) => string | null;

function frameBytes(frame: HistoryFrame): number {
  return frame.url.length + JSON.stringify(frame.deck).length;
}

export class MicroBrowser {
  url = "";
  deck: DeckJson | null = null;
  cardId = "";
  history: HistoryFrame[] = [];
  droppedFrames = 0;
  metrics: MetricsJson | null = null;
  focus = 0;
  scroll = 0;
  form: FormState = { fields: {}, chosen: {} };
  overlay: OverlayItem[] | null = null;
  overlayFocus = 0;
  status = "";

  private queue: Promise<void> = Promise.resolve();

  constructor(
    private readonly transport: Transport,
    private readonly prompter: Prompter = () => null,
    readonly device: DeviceProfile = PHONE,
  ) {}

  /** Serialize operations: one in-flight fetch, later input queued. */
  private enqueue(op: () => Promise<void>): Promise<void> {
    this.queue = this.queue.then(op, op);
    return this.queue;
  }

  card(): CardJson | null {
    if (!this.deck) return null;
    return this.deck.cards.find((c) => c.id === this.cardId) ?? this.deck.cards[0] ?? null;
  }

  layout(): CardLayout {
    const card = this.card();
    if (!card) {
      return { title: "(no deck)", lines: [""], focusables: [], dos: [] };
    }
    return layoutCard(card, this.form, this.device.cols);
  }

  /** The visible grid: exactly device.rows lines of device.cols chars. */
  screen(): string[] {
    if (this.overlay) {
      const grid = [`[Options]`.slice(0, this.device.cols)];
      const contentRows = this.device.rows - 2;
      for (let i = 0; i < contentRows; i++) {
        const item = this.overlay[i];
        const marker = i === this.overlayFocus ? ">" : " ";
        grid.push(item ? (marker + item.label).slice(0, this.device.cols) : "");
      }
      grid.push("OK".padEnd(this.device.cols - 4).slice(0, this.device.cols - 4) + "Back");
      return grid;
    }
    return viewport(this.layout(), this.scroll, this.focus, this.device.rows,
                    this.device.cols).grid;
  }

  metricsOverlay(): string {
    if (!this.metrics) return "";
    return `${this.metrics.bytes} B  ${this.metrics.duration_ms} ms  ${this.metrics.cost_cents} c`;
  }

  loadUrl(url: string): Promise<void> {
    return this.enqueue(() => this.fetchInto(url, undefined, true));
  }

  private async fetchInto(url: string, form: Record<string, string> | undefined,
                          pushFrame: boolean): Promise<void> {
    let deck: DeckJson;
    try {
      deck = await this.transport(url, form);
    } catch (err) {
      this.status = `fetch failed: ${String(err)}`;
      return;
    }
    if (pushFrame && this.deck) {
      this.pushHistory();
    }
    this.url = deck.url ?? url;
    this.deck = deck;
    this.cardId = deck.cards[0]?.id ?? "";
    this.metrics = deck.metrics;
    this.form = { fields: {}, chosen: {} };
    this.focus = 0;
    this.scroll = 0;
    this.overlay = null;
    this.status = "";
  }

  private pushHistory(): void {
    if (!this.deck) return;
    this.history.push({ url: this.url, cardId: this.cardId, deck: this.deck });
    let total = this.history.reduce((n, f) => n + frameBytes(f), 0);
    while (this.history.length > 0 && total > this.device.memoryBytes) {
      total -= frameBytes(this.history[0]);
      this.history.shift();
      this.droppedFrames += 1;
      this.status = `history trimmed (${this.droppedFrames})`;
    }
  }

  private switchCard(cardId: string): void {
    this.pushHistory();
    this.cardId = cardId;
    this.focus = 0;
    this.scroll = 0;
  }

  private goBack(): void {
    const frame = this.history.pop();
    if (!frame) return; // empty history: no-op
    this.url = frame.url;
    this.deck = frame.deck;
    this.cardId = frame.cardId;
    this.focus = 0;
    this.scroll = 0;
    this.overlay = null;
  }

  /** Form fields the current card would submit. */
  private collectForm(card: CardJson): Record<string, string> {
    const form: Record<string, string> = {};
    const walk = (nodes: typeof card.nodes) => {
      for (const node of nodes) {
        if (node.type === "p") walk(node.children);
        else if (node.type === "postfield") form[node.name] = node.value;
        else if (node.type === "input") form[node.name] = this.form.fields[node.name] ?? "";
        else if (node.type === "select") {
          const index = this.form.chosen[node.name] ?? 0;
          form[node.name] = node.options[index]?.value ?? "";
        }
      }
    };
    walk(card.nodes);
    return form;
  }

  private async runDo(button: DoButton): Promise<void> {
    if (button.kind === "prev" || button.target === "back") {
      this.goBack();
      return;
    }
    if (button.target.startsWith("#")) {
      this.switchCard(button.target.slice(1));
      return;
    }
    if (button.kind === "accept") {
      const card = this.card();
      if (!card) return;
      await this.fetchInto(button.target, this.collectForm(card), true);
      return;
    }
    await this.fetchInto(button.target, undefined, true);
  }

  private async activateFocused(): Promise<void> {
    const layout = this.layout();
    const focused = layout.focusables[this.focus];
    if (focused) {
      const node = focused.node;
      if (node.type === "a") {
        if (node.href.startsWith("#")) this.switchCard(node.href.slice(1));
        else await this.fetchInto(node.href, undefined, true);
        return;
      }
      if (node.type === "input") {
        const current = this.form.fields[node.name] ?? "";
        const value = this.prompter(node.name, current);
        if (value !== null) this.form.fields[node.name] = value;
        return;
      }
      if (node.type === "select") {
        const index = this.form.chosen[node.name] ?? 0;
        this.form.chosen[node.name] = node.options.length
          ? (index + 1) % node.options.length
          : 0;
        return;
      }
    }
    const accept = layout.dos.find((d) => d.kind === "accept");
    if (accept) await this.runDo(accept);
  }

  private openOptions(): void {
    const layout = this.layout();
    const items: OverlayItem[] = [];
    const options = layout.dos.find((d) => d.kind === "options");
    if (options) {
      items.push({ label: options.label || "Main menu", target: options.target, submit: false });
    }
    for (const d of layout.dos) {
      if (d.kind === "accept") {
        items.push({ label: d.label || "OK", target: d.target, submit: true });
      }
    }
    if (items.length > 0) {
      this.overlay = items;
      this.overlayFocus = 0;
    }
  }

  private async runOverlayItem(item: OverlayItem): Promise<void> {
    this.overlay = null;
    if (item.submit) {
      const card = this.card();
      if (card) await this.fetchInto(item.target, this.collectForm(card), true);
    } else if (item.target.startsWith("#")) {
      this.switchCard(item.target.slice(1));
    } else {
      await this.fetchInto(item.target, undefined, true);
    }
  }

  pressKey(key: Key): Promise<void> {
    return this.enqueue(async () => {
      if (this.overlay) {
        await this.overlayKey(key);
        return;
      }
      if (key >= "0" && key <= "9") {
        const n = parseInt(key, 10);
        const layout = this.layout();
        const index = layout.focusables.findIndex((f) => f.menuNumber === n);
        if (index >= 0) {
          this.focus = index;
          this.scroll = scrollToFocus(layout, this.focus, this.scroll, this.device.rows);
          await this.activateFocused();
        }
        return;
      }
      switch (key) {
        case "up":
        case "down": {
          const layout = this.layout();
          const delta = key === "down" ? 1 : -1;
          const next = this.focus + delta;
          if (layout.focusables.length > 0 && next >= 0 && next < layout.focusables.length) {
            this.focus = next;
            this.scroll = scrollToFocus(layout, this.focus, this.scroll, this.device.rows);
          } else {
            this.scroll = Math.min(Math.max(0, this.scroll + delta),
                                   maxScroll(layout, this.device.rows));
          }
          return;
        }
        case "accept":
          await this.activateFocused();
          return;
        case "options":
          this.openOptions();
          return;
        case "back":
          this.goBack();
          return;
      }
    });
  }

  private async overlayKey(key: Key): Promise<void> {
    if (!this.overlay) return;
    if (key >= "1" && key <= "9") {
      const item = this.overlay[parseInt(key, 10) - 1];
      if (item) await this.runOverlayItem(item);
      return;
    }
    switch (key) {
      case "up":
        this.overlayFocus = Math.max(0, this.overlayFocus - 1);
        return;
      case "down":
        this.overlayFocus = Math.min(this.overlay.length - 1, this.overlayFocus + 1);
        return;
      case "accept": {
        const item = this.overlay[this.overlayFocus];
        if (item) await this.runOverlayItem(item);
        return;
      }
      case "back":
      case "options":
        this.overlay = null;
        return;
    }
  }
}
