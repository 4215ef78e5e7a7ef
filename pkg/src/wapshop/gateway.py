"""Gateway pipeline and the measurement apparatus behind channel comparisons.

The gateway fetches textual decks from the origin, validates and
compiles them, and forwards binary - failures become small compiled
error decks, never protocol errors.  Link timing and airtime cost use
ceiling arithmetic so figures are deterministic and conservative.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import wbxml, wml
from .lint import LintPolicy
from .shop import Store
from .storefront import HTML_ROUTES, Route, Storefront, parse_route, wrap_text
from .wml import WmlDeck


@dataclass(frozen=True)
class LinkProfile:
    name: str
    bitrate: int  # bits per second
    rtt: int = 0  # milliseconds added per request

    def __post_init__(self):
        if self.bitrate <= 0:
            raise ValueError("bitrate must be positive")
        if self.rtt < 0:
            raise ValueError("rtt must be >= 0")


# 2G handset link and a wired dial-up modem; rtt defaults are configuration
# and always recorded in report headers.
WAP_2G = LinkProfile("wap2g", 9600, 1500)
DIALUP = LinkProfile("dialup", 56000, 150)

AIRTIME = "airtime_per_minute"
FLAT = "flat"


@dataclass(frozen=True)
class Tariff:
    kind: str
    rate: int = 0  # euro cents per minute for airtime; 0 for flat

    def __post_init__(self):
        if self.kind not in (AIRTIME, FLAT):
            raise ValueError(f"unknown tariff kind '{self.kind}'")
        if self.rate < 0:
            raise ValueError("rate must be >= 0")


AIRTIME_TARIFF = Tariff(AIRTIME, 12)
FLAT_TARIFF = Tariff(FLAT, 0)


@dataclass(frozen=True)
class TransferMetrics:
    payload: int
    duration_ms: int
    cost_cents: int


def simulate_transfer(payload: int, link: LinkProfile) -> int:
    """Milliseconds to move `payload` bytes over the link, rounded up."""
    if payload < 0:
        raise ValueError("payload must be >= 0")
    return -(-payload * 8 * 1000 // link.bitrate) + link.rtt


def airtime_cost(duration_ms: int, tariff: Tariff) -> int:
    """Euro cents billed for a connection of the given duration."""
    if duration_ms < 0:
        raise ValueError("duration must be >= 0")
    if tariff.kind == FLAT:
        return 0
    return -(-duration_ms * tariff.rate // 60000)


def transfer_metrics(payload: int, link: LinkProfile, tariff: Tariff) -> TransferMetrics:
    duration = simulate_transfer(payload, link)
    return TransferMetrics(payload, duration, airtime_cost(duration, tariff))


class RouteNotComparable(Exception):
    """Route exists only in the deck channel."""


class Gateway:
    """Fetch, validate, compile and forward; errors travel as decks."""

    def __init__(self, fetch_text, policy: LintPolicy | None = None,
                 link: LinkProfile = WAP_2G, tariff: Tariff = AIRTIME_TARIFF,
                 image_weights: dict | None = None):
        self.fetch_text = fetch_text
        self.policy = policy or LintPolicy()
        self.link = link
        self.tariff = tariff
        self.image_weights = image_weights or {}

    def _error_bytes(self, message: str) -> bytes:
        deck = WmlDeck((wml.WmlCard(
            "error", "Gateway error",
            tuple(wrap_text(message)) + (wml.Do("prev", "Back", wml.BACK_TARGET),),
        ),))
        return wbxml.compile_deck(deck).bytes

    def compile_source(self, source: str) -> bytes:
        """Validate and compile origin text; problems become error decks."""
        try:
            deck = wml.parse_deck(source)
        except wml.ParseError as exc:
            return self._error_bytes(f"Bad content: {exc.reason}")
        violations = wml.validate_deck(deck)
        if violations:
            return self._error_bytes(f"Invalid deck: {violations[0].code}")
        compiled = wbxml.compile_deck(deck).bytes
        if len(compiled) > self.policy.max_compiled_bytes:
            return self._error_bytes(
                f"R1: deck is {len(compiled)} bytes, "
                f"limit {self.policy.max_compiled_bytes}"
            )
        return compiled

    def handle_request(self, url: str) -> bytes:
        """Binary response for a deck URL; never raises for origin trouble."""
        try:
            source = self.fetch_text(url)
        except Exception as exc:
            return self._error_bytes(f"Origin failed: {exc}")
        return self.compile_source(source)

    def page_weight(self, deck: WmlDeck, compiled_len: int) -> int:
        total = compiled_len
        seen = set()
        for card in deck.cards:
            for node in wml.iter_nodes(card.content):
                if isinstance(node, wml.Image) and node.src not in seen:
                    seen.add(node.src)
                    total += self.image_weights.get(node.src, 0)
        return total

    def deck_json(self, url: str) -> dict:
        """Decoded deck plus transfer metrics, for the phone emulator UI."""
        return self.json_from_bytes(self.handle_request(url))

    def json_from_bytes(self, data: bytes) -> dict:
        deck = wbxml.decompile_deck(data)
        payload = self.page_weight(deck, len(data))
        metrics = transfer_metrics(payload, self.link, self.tariff)
        return {
            "cards": [
                {
                    "id": card.id,
                    "title": card.title,
                    "nodes": [node_to_json(n) for n in card.content],
                }
                for card in deck.cards
            ],
            "metrics": {
                "bytes": metrics.payload,
                "duration_ms": metrics.duration_ms,
                "cost_cents": metrics.cost_cents,
            },
        }


def node_to_json(node) -> dict:
    if isinstance(node, wml.Text):
        return {"type": "text", "text": node.text}
    if isinstance(node, wml.Paragraph):
        return {"type": "p", "children": [node_to_json(c) for c in node.children]}
    if isinstance(node, wml.Anchor):
        return {"type": "a", "href": node.href, "label": node.label}
    if isinstance(node, wml.Do):
        return {"type": "do", "kind": node.kind, "label": node.label, "target": node.target}
    if isinstance(node, wml.Input):
        return {"type": "input", "name": node.name, "kind": node.kind}
    if isinstance(node, wml.Select):
        return {"type": "select", "name": node.name,
                "options": [{"label": l, "value": v} for l, v in node.options]}
    if isinstance(node, wml.Table):
        return {"type": "table", "rows": [list(r) for r in node.rows]}
    if isinstance(node, wml.Image):
        return {"type": "img", "src": node.src, "alt": node.alt}
    if isinstance(node, wml.Break):
        return {"type": "br"}
    if isinstance(node, wml.Postfield):
        return {"type": "postfield", "name": node.name, "value": node.value}
    raise TypeError(f"not a node: {node!r}")


@dataclass(frozen=True)
class ComparisonRow:
    route: str
    wml_bytes: int
    wml_ms: int
    wml_cost: int
    html_bytes: int
    html_ms: int
    html_cost: int


@dataclass(frozen=True)
class ComparisonReport:
    wap_link: LinkProfile
    html_link: LinkProfile
    wap_tariff: Tariff
    html_tariff: Tariff
    rows: tuple

    @property
    def totals(self) -> ComparisonRow:
        return ComparisonRow(
            "TOTAL",
            sum(r.wml_bytes for r in self.rows),
            sum(r.wml_ms for r in self.rows),
            sum(r.wml_cost for r in self.rows),
            sum(r.html_bytes for r in self.rows),
            sum(r.html_ms for r in self.rows),
            sum(r.html_cost for r in self.rows),
        )

    def to_text(self) -> str:
        def tariff_str(t: Tariff) -> str:
            return "flat" if t.kind == FLAT else f"{t.rate} c/min"

        lines = [
            "channel comparison",
            f"  wap:  {self.wap_link.bitrate} bit/s, rtt {self.wap_link.rtt} ms, "
            f"tariff {tariff_str(self.wap_tariff)}",
            f"  html: {self.html_link.bitrate} bit/s, rtt {self.html_link.rtt} ms, "
            f"tariff {tariff_str(self.html_tariff)}",
            "",
            f"{'route':<28} {'wml B':>7} {'wml ms':>8} {'wml c':>6} "
            f"{'html B':>8} {'html ms':>8} {'html c':>7}",
        ]
        for row in list(self.rows) + [self.totals]:
            lines.append(
                f"{row.route:<28} {row.wml_bytes:>7} {row.wml_ms:>8} {row.wml_cost:>6} "
                f"{row.html_bytes:>8} {row.html_ms:>8} {row.html_cost:>7}"
            )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "links": {
                "wap": {"bitrate": self.wap_link.bitrate, "rtt": self.wap_link.rtt},
                "html": {"bitrate": self.html_link.bitrate, "rtt": self.html_link.rtt},
            },
            "tariffs": {
                "wap": {"kind": self.wap_tariff.kind, "rate": self.wap_tariff.rate},
                "html": {"kind": self.html_tariff.kind, "rate": self.html_tariff.rate},
            },
            "rows": [vars(r) for r in self.rows],
            "totals": vars(self.totals),
        }
        return json.dumps(doc, ensure_ascii=False, indent=1)


def comparison_row(storefront: Storefront, route: Route | str, token: str | None,
                   username: str | None,
                   wap_link: LinkProfile = WAP_2G, html_link: LinkProfile = DIALUP,
                   wap_tariff: Tariff = AIRTIME_TARIFF,
                   html_tariff: Tariff = FLAT_TARIFF) -> ComparisonRow:
    """Measure one route in both channels."""
    if isinstance(route, str):
        route = parse_route(route)
    if route.path not in HTML_ROUTES:
        raise RouteNotComparable(route.path)

    wml_route = Route(route.path, route.params + ((("s", token),) if token else ()))
    deck = storefront.render_page(wml_route)
    compiled = wbxml.compile_deck(deck).bytes
    weights = storefront.asset_weights()
    wml_total = len(compiled)
    seen = set()
    for card in deck.cards:
        for node in wml.iter_nodes(card.content):
            if isinstance(node, wml.Image) and node.src not in seen:
                seen.add(node.src)
                wml_total += weights.get(node.src, 0)

    html_params = tuple((k, v) for k, v in route.params if k != "s")
    if username and route.path in ("cart", "order-confirm"):
        html_params += (("u", username),)
    html_bytes, assets = storefront.render_html_page(Route(route.path, html_params))
    html_total = len(html_bytes) + sum(weight for _, weight in assets)

    label_params = tuple((k, v) for k, v in route.params if k != "s")
    label = Route(route.path, label_params).url()
    return ComparisonRow(
        route=label,
        wml_bytes=wml_total,
        wml_ms=simulate_transfer(wml_total, wap_link),
        wml_cost=airtime_cost(simulate_transfer(wml_total, wap_link), wap_tariff),
        html_bytes=html_total,
        html_ms=simulate_transfer(html_total, html_link),
        html_cost=airtime_cost(simulate_transfer(html_total, html_link), html_tariff),
    )


def compare_channels(journey, store: Store, username: str | None = None,
                     storefront: Storefront | None = None,
                     wap_link: LinkProfile = WAP_2G, html_link: LinkProfile = DIALUP,
                     wap_tariff: Tariff = AIRTIME_TARIFF,
                     html_tariff: Tariff = FLAT_TARIFF) -> ComparisonReport:
    """Per-route size/time/cost rows for a journey, rendered in both channels.

    When a username is given a session is created for it so that
    routes behind authentication render their real content.
    """
    sf = storefront or Storefront(store)
    token = None
    if username:
        customer = store.get_customer(username)
        token = sf.sessions.create(customer, sf.clock()).token
    rows = [
        comparison_row(sf, route, token, username,
                       wap_link, html_link, wap_tariff, html_tariff)
        for route in journey
    ]
    return ComparisonReport(wap_link, html_link, wap_tariff, html_tariff, tuple(rows))
