/**
 * DOM wiring: draws the browser's character grid into the phone frame
 * and maps on-screen keypad buttons plus the physical keyboard onto
 * browser keys.  The current deck URL (session token included) lives
 * in the page fragment, never in a cookie, so reloading the page
 * reopens the same session.
 */

import { Key, MicroBrowser } from "./browser.js";
import { httpTransport } from "./client.js";

const GATEWAY = (window as { WAPSHOP_GATEWAY?: string }).WAPSHOP_GATEWAY
  ?? `${location.protocol}//${location.hostname}:8081`;

const browser = new MicroBrowser(
  httpTransport(GATEWAY),
  (name, current) => window.prompt(`${name}:`, current),
);

function draw(): void {
  const screen = document.getElementById("screen")!;
  screen.textContent = browser.screen().join("\n");
  document.getElementById("metrics")!.textContent = browser.metricsOverlay();
  document.getElementById("status")!.textContent =
    browser.status || (browser.droppedFrames ? `history trimmed (${browser.droppedFrames})` : "");
  if (browser.url) {
    history.replaceState(null, "", `#${browser.url}`);
  }
}

async function press(key: Key): Promise<void> {
  await browser.pressKey(key);
  draw();
}

const KEYMAP: Record<string, Key> = {
  ArrowUp: "up",
  ArrowDown: "down",
  Enter: "accept",
  Backspace: "back",
  o: "options",
  O: "options",
};

window.addEventListener("keydown", (event) => {
  const key = /^[0-9]$/.test(event.key) ? (event.key as Key) : KEYMAP[event.key];
  if (key) {
    event.preventDefault();
    void press(key);
  }
});

document.querySelectorAll<HTMLButtonElement>("button[data-key]").forEach((btn) => {
  btn.addEventListener("click", () => void press(btn.dataset.key as Key));
});

const startUrl = location.hash ? location.hash.slice(1) : "/intro";
void browser.loadUrl(startUrl).then(draw);
