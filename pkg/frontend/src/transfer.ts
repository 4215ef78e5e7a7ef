/**
 * Mirror of the gateway's link arithmetic, used to sanity-check the
 * metrics overlay against what the gateway reports.  Ceiling division
 * throughout, so both sides agree to the millisecond and cent.
 */

export interface Link {
  bitrate: number; // bits per second
  rtt: number; // ms per request
}

export const WAP_2G: Link = { bitrate: 9600, rtt: 1500 };

export function simulateTransfer(payloadBytes: number, link: Link): number {
  if (payloadBytes < 0) throw new Error("payload must be >= 0");
  return Math.ceil((payloadBytes * 8 * 1000) / link.bitrate) + link.rtt;
}

export function airtimeCost(durationMs: number, centsPerMinute: number): number {
  if (durationMs < 0) throw new Error("duration must be >= 0");
  return Math.ceil((durationMs * centsPerMinute) / 60000);
}

export function formatMetrics(bytes: number, durationMs: number, costCents: number): string {
  return `${bytes} B  ${durationMs} ms  ${costCents} c`;
}
