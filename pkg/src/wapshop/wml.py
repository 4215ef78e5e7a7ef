"""WML document model, parser, canonical serializer and structural validator.

A deck is a tree of immutable nodes covering the element subset a
micro-browser needs: text, paragraphs, links, softkey actions, form
fields, tables, small images and line breaks.  The grammar is closed:
any element, attribute or entity outside the permitted sets is a parse
error, never a silently dropped node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

# Canonical attribute order for serialized output.  Fixed so that byte
# sizes of rendered decks are reproducible.
ATTR_ORDER = (
    "id", "title", "href", "type", "label", "name",
    "value", "src", "alt", "method", "columns",
)

DO_KINDS = ("accept", "prev", "options")
INPUT_KINDS = ("text", "password")

# Navigation target that pops the client history instead of fetching.
BACK_TARGET = "back"


class ParseError(Exception):
    """Malformed or out-of-grammar markup."""

    def __init__(self, position: int, reason: str):
        super().__init__(f"parse error at {position}: {reason}")
        self.position = position
        self.reason = reason


@dataclass(frozen=True)
class Text:
    text: str


def _merge_text(nodes) -> tuple:
    # Adjacent text runs are indistinguishable once serialized, so the
    # model keeps them merged.
    merged: list = []
    for node in nodes:
        if merged and isinstance(node, Text) and isinstance(merged[-1], Text):
            merged[-1] = Text(merged[-1].text + node.text)
        else:
            merged.append(node)
    return tuple(merged)


@dataclass(frozen=True)
class Paragraph:
    children: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "children", _merge_text(self.children))


@dataclass(frozen=True)
class Anchor:
    href: str
    label: str = ""


@dataclass(frozen=True)
class Do:
    kind: str
    label: str
    target: str  # href, or BACK_TARGET for a history pop


@dataclass(frozen=True)
class Input:
    name: str
    kind: str = "text"


@dataclass(frozen=True)
class Select:
    name: str
    options: tuple = ()  # (label, value) pairs

    def __post_init__(self):
        object.__setattr__(self, "options", tuple((l, v) for l, v in self.options))


@dataclass(frozen=True)
class Table:
    rows: tuple = ()  # rows of cell strings

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))


@dataclass(frozen=True)
class Image:
    src: str
    alt: str


@dataclass(frozen=True)
class Break:
    pass


@dataclass(frozen=True)
class Postfield:
    name: str
    value: str


Node = Union[Text, Paragraph, Anchor, Do, Input, Select, Table, Image, Break, Postfield]


@dataclass(frozen=True)
class WmlCard:
    id: str
    title: str = ""
    content: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "content", _merge_text(self.content))


@dataclass(frozen=True)
class WmlDeck:
    cards: tuple
    # Byte length of the textual form this deck was parsed from; 0 for
    # constructed decks.  Not part of structural equality.
    source_bytes: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "cards", tuple(self.cards))

    def card(self, card_id: str) -> WmlCard:
        for c in self.cards:
            if c.id == card_id:
                return c
        raise KeyError(card_id)


@dataclass(frozen=True)
class Violation:
    code: str
    card_id: str
    detail: str


def iter_nodes(nodes: Iterable[Node]) -> Iterator[Node]:
    """Walk a content list in document order, descending into paragraphs."""
    for node in nodes:
        yield node
        if isinstance(node, Paragraph):
            yield from iter_nodes(node.children)


# ---------------------------------------------------------------------------
# Generic element tree shared by the text form and the binary codec.

@dataclass
class _Elem:
    tag: str
    attrs: dict
    children: list  # _Elem or str
    pos: int = 0


class StructureError(Exception):
    """Element tree does not map onto the document model."""

    def __init__(self, pos: int, reason: str):
        super().__init__(reason)
        self.pos = pos
        self.reason = reason


_TAGS = frozenset({
    "wml", "card", "p", "a", "do", "go", "input", "select", "option",
    "table", "tr", "td", "img", "br", "postfield",
})

_ALLOWED_ATTRS = {
    "wml": (), "card": ("id", "title"), "p": (), "a": ("href",),
    "do": ("type", "label"), "go": ("href",), "input": ("name", "type"),
    "select": ("name",), "option": ("value",), "table": ("columns",),
    "tr": (), "td": (), "img": ("src", "alt"), "br": (),
    "postfield": ("name", "value"),
}

_REQUIRED_ATTRS = {
    "card": ("id",), "a": ("href",), "do": ("type",), "go": ("href",),
    "input": ("name",), "select": ("name",), "option": ("value",),
    "img": ("src", "alt"), "postfield": ("name", "value"),
}

# Tags that may appear in card or paragraph content.
_CONTENT_TAGS = frozenset({
    "p", "a", "do", "input", "select", "table", "img", "br", "postfield",
})


def _check_attrs(e: _Elem) -> None:
    allowed = _ALLOWED_ATTRS[e.tag]
    for name in e.attrs:
        if name not in allowed:
            raise StructureError(e.pos, f"attribute '{name}' not allowed on <{e.tag}>")
    for name in _REQUIRED_ATTRS.get(e.tag, ()):
        if name not in e.attrs:
            raise StructureError(e.pos, f"<{e.tag}> requires attribute '{name}'")


def _text_only(e: _Elem) -> str:
    if not e.children:
        return ""
    if len(e.children) == 1 and isinstance(e.children[0], str):
        return e.children[0]
    raise StructureError(e.pos, f"<{e.tag}> may contain only text")


def _elem_to_node(e) -> Node:
    if isinstance(e, str):
        return Text(e)
    _check_attrs(e)
    tag = e.tag
    if tag == "p":
        return Paragraph(tuple(_content_nodes(e)))
    if tag == "a":
        return Anchor(href=e.attrs["href"], label=_text_only(e))
    if tag == "do":
        kind = e.attrs["type"]
        if kind not in DO_KINDS:
            raise StructureError(e.pos, f"unknown do type '{kind}'")
        if len(e.children) != 1 or isinstance(e.children[0], str) or e.children[0].tag != "go":
            raise StructureError(e.pos, "<do> must contain exactly one <go>")
        go = e.children[0]
        _check_attrs(go)
        if go.children:
            raise StructureError(go.pos, "<go> is empty")
        return Do(kind=kind, label=e.attrs.get("label", ""), target=go.attrs["href"])
    if tag == "input":
        kind = e.attrs.get("type", "text")
        if kind not in INPUT_KINDS:
            raise StructureError(e.pos, f"unknown input type '{kind}'")
        if e.children:
            raise StructureError(e.pos, "<input> is empty")
        return Input(name=e.attrs["name"], kind=kind)
    if tag == "select":
        options = []
        for child in e.children:
            if isinstance(child, str) or child.tag != "option":
                raise StructureError(e.pos, "<select> may contain only <option>")
            _check_attrs(child)
            options.append((_text_only(child), child.attrs["value"]))
        return Select(name=e.attrs["name"], options=tuple(options))
    if tag == "table":
        cols = e.attrs.get("columns")
        if cols is not None and not cols.isdigit():
            raise StructureError(e.pos, "columns must be numeric")
        rows = []
        for tr in e.children:
            if isinstance(tr, str) or tr.tag != "tr":
                raise StructureError(e.pos, "<table> may contain only <tr>")
            _check_attrs(tr)
            cells = []
            for td in tr.children:
                if isinstance(td, str) or td.tag != "td":
                    raise StructureError(tr.pos, "<tr> may contain only <td>")
                _check_attrs(td)
                cells.append(_text_only(td))
            rows.append(tuple(cells))
        return Table(tuple(rows))
    if tag == "img":
        if e.children:
            raise StructureError(e.pos, "<img> is empty")
        return Image(src=e.attrs["src"], alt=e.attrs["alt"])
    if tag == "br":
        if e.children:
            raise StructureError(e.pos, "<br> is empty")
        return Break()
    if tag == "postfield":
        if e.children:
            raise StructureError(e.pos, "<postfield> is empty")
        return Postfield(name=e.attrs["name"], value=e.attrs["value"])
    raise StructureError(e.pos, f"element <{tag}> not allowed here")


def _content_nodes(e: _Elem) -> list:
    nodes = []
    for child in e.children:
        if not isinstance(child, str) and child.tag not in _CONTENT_TAGS:
            raise StructureError(child.pos, f"element <{child.tag}> not allowed here")
        nodes.append(_elem_to_node(child))
    return nodes


def _elem_to_deck(root: _Elem, source_bytes: int = 0) -> WmlDeck:
    if root.tag != "wml":
        raise StructureError(root.pos, "document element must be <wml>")
    _check_attrs(root)
    cards = []
    for child in root.children:
        if isinstance(child, str) or child.tag != "card":
            raise StructureError(root.pos, "<wml> may contain only <card>")
        _check_attrs(child)
        cards.append(WmlCard(
            id=child.attrs["id"],
            title=child.attrs.get("title", ""),
            content=tuple(_content_nodes(child)),
        ))
    return WmlDeck(tuple(cards), source_bytes=source_bytes)


def _node_to_elem(node: Node):
    if isinstance(node, Text):
        return node.text
    if isinstance(node, Paragraph):
        return _Elem("p", {}, [_node_to_elem(c) for c in node.children])
    if isinstance(node, Anchor):
        return _Elem("a", {"href": node.href}, [node.label] if node.label else [])
    if isinstance(node, Do):
        attrs = {"type": node.kind}
        if node.label:
            attrs["label"] = node.label
        return _Elem("do", attrs, [_Elem("go", {"href": node.target}, [])])
    if isinstance(node, Input):
        return _Elem("input", {"type": node.kind, "name": node.name}, [])
    if isinstance(node, Select):
        options = [
            _Elem("option", {"value": value}, [label] if label else [])
            for label, value in node.options
        ]
        return _Elem("select", {"name": node.name}, options)
    if isinstance(node, Table):
        columns = max((len(r) for r in node.rows), default=0)
        rows = [
            _Elem("tr", {}, [_Elem("td", {}, [cell] if cell else []) for cell in row])
            for row in node.rows
        ]
        return _Elem("table", {"columns": str(columns)}, rows)
    if isinstance(node, Image):
        return _Elem("img", {"src": node.src, "alt": node.alt}, [])
    if isinstance(node, Break):
        return _Elem("br", {}, [])
    if isinstance(node, Postfield):
        return _Elem("postfield", {"name": node.name, "value": node.value}, [])
    raise TypeError(f"not a node: {node!r}")


def _deck_to_elem(deck: WmlDeck) -> _Elem:
    cards = []
    for card in deck.cards:
        attrs = {"id": card.id}
        if card.title:
            attrs["title"] = card.title
        cards.append(_Elem("card", attrs, [_node_to_elem(n) for n in card.content]))
    return _Elem("wml", {}, cards)


# ---------------------------------------------------------------------------
# Text form.

_ENTITIES = {"amp": "&", "lt": "<", "gt": ">", "quot": '"'}
_WS = " \t\r\n"


def _escape_text(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _escape_attr(s: str) -> str:
    return _escape_text(s).replace('"', "&quot;")


class _TextParser:
    def __init__(self, source: str):
        self.s = source
        self.i = 0
        self.n = len(source)

    def parse_document(self) -> _Elem:
        self._skip_ws()
        if self.i >= self.n or self.s[self.i] != "<":
            raise ParseError(self.i, "expected a tag")
        elem = self._element()
        self._skip_ws()
        if self.i < self.n:
            raise ParseError(self.i, "content after document element")
        return elem

    def _skip_ws(self) -> None:
        while self.i < self.n and self.s[self.i] in _WS:
            self.i += 1

    def _name(self) -> str:
        start = self.i
        while self.i < self.n and "a" <= self.s[self.i] <= "z":
            self.i += 1
        if start == self.i:
            raise ParseError(start, "expected a name")
        return self.s[start:self.i]

    def _entity(self) -> str:
        # Only &amp; &lt; &gt; &quot; are recognized.
        start = self.i
        self.i += 1  # past '&'
        end = self.s.find(";", self.i, self.i + 5)
        if end < 0:
            raise ParseError(start, "bare '&' (use &amp;)")
        name = self.s[self.i:end]
        if name not in _ENTITIES:
            raise ParseError(start, f"unknown entity '&{name};'")
        self.i = end + 1
        return _ENTITIES[name]

    def _text(self) -> str:
        out = []
        while self.i < self.n and self.s[self.i] != "<":
            ch = self.s[self.i]
            if ch == "&":
                out.append(self._entity())
            elif ch == "\x00":
                raise ParseError(self.i, "NUL character in text")
            else:
                out.append(ch)
                self.i += 1
        return "".join(out)

    def _attr_value(self) -> str:
        if self.i >= self.n or self.s[self.i] != '"':
            raise ParseError(self.i, 'expected \'"\'')
        self.i += 1
        out = []
        while True:
            if self.i >= self.n:
                raise ParseError(self.i, "unterminated attribute value")
            ch = self.s[self.i]
            if ch == '"':
                self.i += 1
                return "".join(out)
            if ch == "&":
                out.append(self._entity())
            elif ch == "<":
                raise ParseError(self.i, "raw '<' in attribute value")
            elif ch == "\x00":
                raise ParseError(self.i, "NUL character in attribute value")
            else:
                out.append(ch)
                self.i += 1

    def _element(self) -> _Elem:
        pos = self.i
        self.i += 1  # past '<'
        if self.i < self.n and self.s[self.i] == "/":
            raise ParseError(pos, "unexpected closing tag")
        name = self._name()
        if name not in _TAGS:
            raise ParseError(pos + 1, f"unknown element '{name}'")
        attrs: dict = {}
        while True:
            ws_start = self.i
            self._skip_ws()
            if self.i >= self.n:
                raise ParseError(pos, f"unclosed tag '{name}'")
            ch = self.s[self.i]
            if ch == ">":
                self.i += 1
                break
            if self.s.startswith("/>", self.i):
                self.i += 2
                return _Elem(name, attrs, [], pos)
            if ws_start == self.i:
                raise ParseError(self.i, "expected whitespace before attribute")
            attr_pos = self.i
            attr = self._name()
            if attr not in ATTR_ORDER:
                raise ParseError(attr_pos, f"unknown attribute '{attr}'")
            if attr in attrs:
                raise ParseError(attr_pos, f"duplicate attribute '{attr}'")
            if self.i >= self.n or self.s[self.i] != "=":
                raise ParseError(self.i, "expected '='")
            self.i += 1
            attrs[attr] = self._attr_value()
        children: list = []
        while True:
            if self.i >= self.n:
                raise ParseError(pos, f"unclosed element '{name}'")
            if self.s.startswith("</", self.i):
                close_pos = self.i
                self.i += 2
                close = self._name()
                self._skip_ws()
                if self.i >= self.n or self.s[self.i] != ">":
                    raise ParseError(self.i, "expected '>'")
                self.i += 1
                if close != name:
                    raise ParseError(close_pos, f"mismatched closing tag '{close}' (open '{name}')")
                return _Elem(name, attrs, children, pos)
            if self.s[self.i] == "<":
                children.append(self._element())
            else:
                text = self._text()
                if text.strip():
                    children.append(text)


def parse_deck(source: str) -> WmlDeck:
    """Parse textual markup into a deck.

    Whitespace-only text between tags is insignificant and dropped;
    all other text is preserved verbatim.
    """
    if source.startswith("﻿"):
        raise ParseError(0, "byte-order mark not allowed")
    root = _TextParser(source).parse_document()
    try:
        return _elem_to_deck(root, source_bytes=len(source.encode("utf-8")))
    except StructureError as exc:
        raise ParseError(exc.pos, exc.reason) from None


def _serialize_elem(e, out: list) -> None:
    if isinstance(e, str):
        out.append(_escape_text(e))
        return
    out.append(f"<{e.tag}")
    for name in ATTR_ORDER:
        if name in e.attrs:
            out.append(f' {name}="{_escape_attr(e.attrs[name])}"')
    if not e.children:
        out.append("/>")
        return
    out.append(">")
    for child in e.children:
        _serialize_elem(child, out)
    out.append(f"</{e.tag}>")


def serialize_deck(deck: WmlDeck) -> str:
    """Canonical text form: fixed attribute order, no whitespace between tags."""
    out: list = []
    _serialize_elem(_deck_to_elem(deck), out)
    return "".join(out)


# ---------------------------------------------------------------------------
# Structural validation.

def _node_strings(node: Node) -> Iterator[str]:
    if isinstance(node, Text):
        yield node.text
    elif isinstance(node, Anchor):
        yield node.href
        yield node.label
    elif isinstance(node, Do):
        yield node.label
        yield node.target
    elif isinstance(node, Input):
        yield node.name
    elif isinstance(node, Select):
        yield node.name
        for label, value in node.options:
            yield label
            yield value
    elif isinstance(node, Table):
        for row in node.rows:
            yield from row
    elif isinstance(node, Image):
        yield node.src
        yield node.alt
    elif isinstance(node, Postfield):
        yield node.name
        yield node.value


def validate_deck(deck: WmlDeck) -> list:
    """Check deck-level invariants; an empty result means the deck is valid."""
    violations = []
    if not deck.cards:
        violations.append(Violation("EmptyDeck", "", "deck has no cards"))
    seen = set()
    card_ids = set()
    for card in deck.cards:
        if not card.id or any(ch in _WS for ch in card.id):
            violations.append(Violation("BadCardId", card.id, "card id empty or has whitespace"))
        if card.id in seen:
            violations.append(Violation("DuplicateCardId", card.id, card.id))
        seen.add(card.id)
        card_ids.add(card.id)
    for card in deck.cards:
        for node in iter_nodes(card.content):
            for s in _node_strings(node):
                if "\x00" in s:
                    violations.append(Violation("BadText", card.id, "NUL character"))
            if isinstance(node, Text) and not node.text.strip():
                violations.append(Violation("BlankText", card.id, "whitespace-only text"))
            elif isinstance(node, Image) and not node.alt.strip():
                violations.append(Violation("EmptyImageAlt", card.id, node.src))
            elif isinstance(node, Do) and node.kind not in DO_KINDS:
                violations.append(Violation("BadDoKind", card.id, node.kind))
            elif isinstance(node, Input) and node.kind not in INPUT_KINDS:
                violations.append(Violation("BadInputKind", card.id, node.kind))
            targets = []
            if isinstance(node, Anchor):
                targets.append(node.href)
            elif isinstance(node, Do):
                targets.append(node.target)
            for target in targets:
                if target.startswith("#") and target[1:] not in card_ids:
                    violations.append(Violation("DanglingTarget", card.id, target[1:]))
    return violations
