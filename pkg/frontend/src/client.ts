/** HTTP transport against the gateway's /ui/deck endpoint. */

import { DeckJson, Transport } from "./types.js";

export function httpTransport(gatewayBase: string): Transport {
  const base = gatewayBase.replace(/\/$/, "");
  return async (url: string, form?: Record<string, string>): Promise<DeckJson> => {
    const endpoint = `${base}/ui/deck?url=${encodeURIComponent(url)}`;
    const response = form
      ? await fetch(endpoint, {
          method: "POST",
          headers: { "Content-Type": "application/x-www-form-urlencoded" },
          body: new URLSearchParams(form).toString(),
        })
      : await fetch(endpoint);
    if (!response.ok) {
      throw new Error(`gateway ${response.status}`);
    }
    return (await response.json()) as DeckJson;
  };
}
