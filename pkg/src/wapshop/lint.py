"""Usability rule engine and site crawler for constrained-device decks.

Rules:
    R1  compiled deck size within the device budget
    R2  page weight (compiled bytes plus referenced images) within budget
    R3  menus and select options carry ordered numeric prefixes
    R4  every card offers a Back action
    R5  navigation: flat hierarchy depth and alternate routes (site level)
    R6  text lines short enough to avoid horizontal scrolling
    R7  per-image byte budget
Fetch failures during a crawl are recorded under rule FETCH.
Structural defects found while linting surface under rule R0.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field, fields

from . import wbxml, wml
from .wml import Anchor, Break, Do, Image, Paragraph, Select, Table, Text, WmlDeck

FETCH_RULE = "FETCH"


@dataclass(frozen=True)
class LintPolicy:
    max_compiled_bytes: int = 1400
    max_page_weight_bytes: int = 9200
    max_menu_depth: int = 3
    max_line_chars: int = 20
    require_back: bool = True
    require_numbered_menu: bool = True
    max_image_bytes: int = 1000

    def __post_init__(self):
        for name in ("max_compiled_bytes", "max_page_weight_bytes", "max_menu_depth",
                     "max_line_chars", "max_image_bytes"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_overrides(cls, overrides: dict) -> "LintPolicy":
        known = {f.name for f in fields(cls)}
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(f"unknown policy keys: {sorted(unknown)}")
        return cls(**overrides)


@dataclass(frozen=True)
class LintViolation:
    rule: str
    where: str
    message: str


@dataclass(frozen=True)
class LintReport:
    violations: tuple
    checked_decks: int
    # Informational only: nodes per card, a proxy for vertical scrolling.
    card_nodes: tuple = field(default=(), compare=False)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json_dict(self) -> dict:
        return {
            "violations": [
                {"rule": v.rule, "where": v.where, "message": v.message}
                for v in self.violations
            ],
            "checked_decks": self.checked_decks,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), ensure_ascii=False, indent=1)

    def to_text(self) -> str:
        lines = []
        if self.passed:
            lines.append(f"PASS: 0 violations across {self.checked_decks} deck(s)")
        else:
            lines.append(f"FAIL: {len(self.violations)} violation(s) across {self.checked_decks} deck(s)")
            for v in self.violations:
                lines.append(f"  {v.rule}  {v.where}: {v.message}")
        if self.card_nodes:
            lines.append("info: nodes per card (vertical scroll indicator)")
            for where, count in self.card_nodes:
                lines.append(f"  {where}: {count}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SiteGraph:
    root: str
    nodes: tuple
    edges: tuple  # (from, to, label)

    def predecessors(self, node: str) -> set:
        return {f for f, t, _ in self.edges if t == node}

    def adjacency(self) -> dict:
        adj: dict = {n: [] for n in self.nodes}
        for f, t, _ in self.edges:
            adj[f].append(t)
        return adj


class FetchError(Exception):
    """A route could not be fetched or parsed during a crawl."""


def _count_nodes(card: wml.WmlCard) -> int:
    return sum(1 for _ in wml.iter_nodes(card.content))


def _line_lengths(card: wml.WmlCard):
    """Lengths of rendered text runs; runs end at breaks, blocks and newlines."""
    run = 0

    def walk(nodes):
        nonlocal run
        for node in nodes:
            if isinstance(node, Text):
                parts = node.text.split("\n")
                run += len(parts[0])
                for part in parts[1:]:
                    yield run
                    run = len(part)
            elif isinstance(node, Paragraph):
                yield run
                run = 0
                yield from walk(node.children)
                yield run
                run = 0
            else:
                # breaks, links, fields, tables and images all start a new line
                yield run
                run = 0

    yield from walk(card.content)
    yield run


def _numbered(labels, where: str, what: str, out: list) -> None:
    for i, label in enumerate(labels, start=1):
        if not label.startswith(f"{i}."):
            out.append(LintViolation(
                "R3", where,
                f"{what} item {i} is labeled {label!r}, expected prefix '{i}.'",
            ))
            return


def lint_deck(deck: WmlDeck, policy: LintPolicy | None = None,
              image_weights: dict | None = None) -> LintReport:
    """Apply the per-deck rules; problems come back as violations, never errors."""
    policy = policy or LintPolicy()
    image_weights = image_weights or {}
    violations: list = []

    structural = wml.validate_deck(deck)
    if structural:
        for v in structural:
            violations.append(LintViolation("R0", v.card_id, f"{v.code}: {v.detail}"))
        return LintReport(tuple(violations), 1,
                          tuple((c.id, _count_nodes(c)) for c in deck.cards))

    compiled = len(wbxml.compile_deck(deck).bytes)
    first_card = deck.cards[0].id
    if compiled > policy.max_compiled_bytes:
        violations.append(LintViolation(
            "R1", first_card,
            f"compiled size {compiled} exceeds {policy.max_compiled_bytes} bytes",
        ))

    image_total = 0
    seen_srcs = set()
    for card in deck.cards:
        for node in wml.iter_nodes(card.content):
            if not isinstance(node, Image) or node.src in seen_srcs:
                continue
            seen_srcs.add(node.src)
            weight = image_weights.get(node.src)
            if weight is None:
                violations.append(LintViolation(
                    "R7", card.id, f"image '{node.src}' has no known weight"))
                continue
            image_total += weight
            if weight > policy.max_image_bytes:
                violations.append(LintViolation(
                    "R7", card.id,
                    f"image '{node.src}' is {weight} bytes (budget {policy.max_image_bytes})",
                ))

    page_weight = compiled + image_total
    if page_weight > policy.max_page_weight_bytes:
        violations.append(LintViolation(
            "R2", first_card,
            f"page weight {page_weight} exceeds {policy.max_page_weight_bytes} bytes",
        ))

    for card in deck.cards:
        nodes = list(wml.iter_nodes(card.content))
        if policy.require_numbered_menu:
            anchors = [n for n in nodes if isinstance(n, Anchor)]
            if len(anchors) >= 3:
                _numbered([a.label for a in anchors], card.id, "menu", violations)
            for node in nodes:
                if isinstance(node, Select) and node.options:
                    _numbered([label for label, _ in node.options], card.id,
                              f"select '{node.name}'", violations)
        if policy.require_back:
            if not any(isinstance(n, Do) and n.kind == "prev" for n in nodes):
                violations.append(LintViolation("R4", card.id, "no Back action on card"))
        over = [n for n in _line_lengths(card) if n > policy.max_line_chars]
        if over:
            violations.append(LintViolation(
                "R6", card.id,
                f"text line of {max(over)} chars exceeds {policy.max_line_chars}",
            ))

    return LintReport(tuple(violations), 1,
                      tuple((c.id, _count_nodes(c)) for c in deck.cards))


def _route_path(route: str) -> str:
    return route.split("?", 1)[0].strip("/")


def deck_links(deck: WmlDeck):
    """Safe navigation targets of a deck: anchors plus options softkeys.

    Accept actions may change state and prev is a history pop, so a
    crawler must not follow either.  Fragment targets stay in the deck.
    """
    for card in deck.cards:
        for node in wml.iter_nodes(card.content):
            if isinstance(node, Anchor):
                target, label = node.href, node.label
            elif isinstance(node, Do) and node.kind == "options":
                target, label = node.target, node.label
            else:
                continue
            if not target or target == wml.BACK_TARGET or target.startswith("#"):
                continue
            yield target, label


def _strip_session(route: str) -> str:
    path, _, query = route.partition("?")
    if not query:
        return path
    kept = [p for p in query.split("&") if p and not p.startswith("s=")]
    return path + ("?" + "&".join(kept) if kept else "")


def crawl_site(fetcher, root: str, policy: LintPolicy | None = None,
               image_weights: dict | None = None):
    """Breadth-first crawl from root; returns the link graph and a merged report.

    `fetcher` maps a route string to a deck and must be deterministic for
    the duration of the crawl.  Fetch failures become FETCH violations and
    the crawl continues.
    """
    policy = policy or LintPolicy()
    violations: list = []
    card_nodes: list = []
    nodes: set = set()
    edges: list = []
    seen_pairs: set = set()
    checked = 0

    queue = deque([root])
    nodes.add(root)
    while queue:
        route = queue.popleft()
        try:
            deck = fetcher(route)
        except Exception as exc:  # fetcher failures must not stop the crawl
            violations.append(LintViolation(FETCH_RULE, route, str(exc)))
            continue
        checked += 1
        report = lint_deck(deck, policy, image_weights)
        for v in report.violations:
            violations.append(LintViolation(v.rule, route, f"[{v.where}] {v.message}"))
        for where, count in report.card_nodes:
            card_nodes.append((f"{route} {where}", count))
        for target, label in deck_links(deck):
            target = _strip_session(target)
            if (route, target) not in seen_pairs:
                seen_pairs.add((route, target))
                edges.append((route, target, label))
            if target not in nodes:
                nodes.add(target)
                queue.append(target)

    graph = SiteGraph(root=root, nodes=tuple(sorted(nodes)), edges=tuple(sorted(edges)))
    violations.extend(check_navigation(graph, policy))
    violations.sort(key=lambda v: (v.where, v.rule, v.message))
    return graph, LintReport(tuple(violations), checked, tuple(sorted(card_nodes)))


def bfs_depths(adjacency: dict, start: str) -> dict:
    depths = {start: 0}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nxt in adjacency.get(node, ()):
            if nxt not in depths:
                depths[nxt] = depths[node] + 1
                queue.append(nxt)
    return depths


def check_navigation(graph: SiteGraph, policy: LintPolicy | None = None) -> list:
    """Site-level checks: hierarchy depth (R5a) and alternate routes (R5b).

    Depth counts navigations from the main menu.  When the graph has a
    menu node, nodes upstream of it (the intro splash) are measured from
    the crawl root instead, so the entry hop does not shift every depth.
    """
    policy = policy or LintPolicy()
    adjacency = graph.adjacency()
    depths = bfs_depths(adjacency, graph.root)
    menus = [n for n in graph.nodes if _route_path(n) == "menu"]
    if menus:
        menu_depths = bfs_depths(adjacency, menus[0])
        for node, d in menu_depths.items():
            if node not in depths or d < depths[node]:
                depths[node] = d

    violations = []
    for node in graph.nodes:
        depth = depths.get(node)
        if depth is None or depth > policy.max_menu_depth:
            shown = "unreachable" if depth is None else str(depth)
            violations.append(LintViolation(
                "R5", node,
                f"R5a: menu depth {shown} exceeds {policy.max_menu_depth}",
            ))
    for node in graph.nodes:
        if _route_path(node) != "product":
            continue
        preds = graph.predecessors(node)
        if len(preds) < 2:
            violations.append(LintViolation(
                "R5", node,
                f"R5b: only {len(preds)} incoming route(s), need an alternate route",
            ))
    return violations
