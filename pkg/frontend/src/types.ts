/** Wire types for the gateway's decoded-deck endpoint (/ui/deck). */

export type NodeJson =
  | { type: "text"; text: string }
  | { type: "p"; children: NodeJson[] }
  | { type: "a"; href: string; label: string }
  | { type: "do"; kind: "accept" | "prev" | "options"; label: string; target: string }
  | { type: "input"; name: string; kind: "text" | "password" }
  | { type: "select"; name: string; options: { label: string; value: string }[] }
  | { type: "table"; rows: string[][] }
  | { type: "img"; src: string; alt: string }
  | { type: "br" }
  | { type: "postfield"; name: string; value: string };

export interface CardJson {
  id: string;
  title: string;
  nodes: NodeJson[];
}

export interface MetricsJson {
  bytes: number;
  duration_ms: number;
  cost_cents: number;
}

export interface DeckJson {
  cards: CardJson[];
  metrics: MetricsJson;
  /** Final path after a form post's redirect; absent on plain fetches. */
  url?: string;
}

/**
 * Fetches a deck through the gateway. `form` present means a POST
 * (form submission); otherwise a plain fetch of the url.
 */
export type Transport = (url: string, form?: Record<string, string>) => Promise<DeckJson>;

/** Fixed handset profile: a 150x150 screen modelled as 20x8 monospace cells. */
export interface DeviceProfile {
  cols: number;
  rows: number;
  memoryBytes: number;
}

export const PHONE: DeviceProfile = { cols: 20, rows: 8, memoryBytes: 128_000 };
