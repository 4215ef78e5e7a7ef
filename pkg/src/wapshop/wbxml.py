"""Binary deck codec: the compile step a gateway applies before the air link.

Single code page, inline strings, bit-exact and hand-checkable:

    version byte 0x01
    tag byte     = token | 0x40 (has content) | 0x80 (has attributes)
    attribute    = attribute token, then STR_I value
    STR_I        = 0x03, UTF-8 bytes, 0x00
    END  (0x01)  terminates an attribute list and each content list
"""

from __future__ import annotations

from dataclasses import dataclass

from . import wml
from .wml import StructureError, WmlDeck, _deck_to_elem, _Elem, _elem_to_deck

VERSION = 0x01
END = 0x01
STR_I = 0x03
CONTENT_BIT = 0x40
ATTR_BIT = 0x80

TAG_TOKENS = {
    "wml": 0x05, "card": 0x06, "p": 0x07, "a": 0x08, "do": 0x09,
    "go": 0x0A, "input": 0x0B, "select": 0x0C, "option": 0x0D,
    "table": 0x0E, "tr": 0x0F, "td": 0x10, "img": 0x11, "br": 0x12,
    "postfield": 0x13,
}
ATTR_TOKENS = {
    "id": 0x85, "title": 0x86, "href": 0x87, "type": 0x88, "label": 0x89,
    "name": 0x8A, "value": 0x8B, "src": 0x8C, "alt": 0x8D, "method": 0x8E,
    "columns": 0x8F,
}

_TAG_NAMES = {v: k for k, v in TAG_TOKENS.items()}
_ATTR_NAMES = {v: k for k, v in ATTR_TOKENS.items()}


class CodecError(Exception):
    """Byte stream is not a valid compiled deck."""

    def __init__(self, offset: int, reason: str):
        super().__init__(f"codec error at byte {offset}: {reason}")
        self.offset = offset
        self.reason = reason


class InvalidDeck(Exception):
    """Deck failed structural validation and cannot be compiled."""

    def __init__(self, violations):
        super().__init__("; ".join(f"{v.code}({v.detail})" for v in violations))
        self.violations = list(violations)


@dataclass(frozen=True)
class CompiledDeck:
    bytes: bytes
    source_card_count: int


def _append_str_i(value: str, out: bytearray) -> None:
    out.append(STR_I)
    out.extend(value.encode("utf-8"))
    out.append(0x00)


def _encode_elem(e: _Elem, out: bytearray) -> None:
    byte = TAG_TOKENS[e.tag]
    if e.attrs:
        byte |= ATTR_BIT
    if e.children:
        byte |= CONTENT_BIT
    out.append(byte)
    if e.attrs:
        for name in wml.ATTR_ORDER:  # canonical order, independent of dict order
            if name in e.attrs:
                out.append(ATTR_TOKENS[name])
                _append_str_i(e.attrs[name], out)
        out.append(END)
    if e.children:
        for child in e.children:
            if isinstance(child, str):
                _append_str_i(child, out)
            else:
                _encode_elem(child, out)
        out.append(END)


def compile_deck(deck: WmlDeck) -> CompiledDeck:
    """Compile a valid deck to its deterministic binary form."""
    violations = wml.validate_deck(deck)
    if violations:
        raise InvalidDeck(violations)
    out = bytearray([VERSION])
    _encode_elem(_deck_to_elem(deck), out)
    return CompiledDeck(bytes(out), len(deck.cards))


def compiled_size(deck: WmlDeck) -> int:
    return len(compile_deck(deck).bytes)


class _Decoder:
    def __init__(self, data: bytes):
        self.data = data
        self.i = 0

    def _byte(self) -> int:
        if self.i >= len(self.data):
            raise CodecError(self.i, "truncated stream")
        b = self.data[self.i]
        self.i += 1
        return b

    def _peek(self) -> int:
        if self.i >= len(self.data):
            raise CodecError(self.i, "truncated stream")
        return self.data[self.i]

    def _str_i(self) -> str:
        start = self.i
        if self._byte() != STR_I:
            raise CodecError(start, "expected inline string")
        end = self.data.find(0x00, self.i)
        if end < 0:
            raise CodecError(start, "unterminated inline string")
        raw = self.data[self.i:end]
        self.i = end + 1
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError:
            raise CodecError(start, "invalid UTF-8 in inline string") from None

    def element(self) -> _Elem:
        pos = self.i
        byte = self._byte()
        token = byte & ~(ATTR_BIT | CONTENT_BIT)
        name = _TAG_NAMES.get(token)
        if name is None:
            raise CodecError(pos, f"unknown tag token 0x{byte:02X}")
        attrs: dict = {}
        if byte & ATTR_BIT:
            while True:
                tok_pos = self.i
                tok = self._byte()
                if tok == END:
                    break
                attr = _ATTR_NAMES.get(tok)
                if attr is None:
                    raise CodecError(tok_pos, f"unknown attribute token 0x{tok:02X}")
                if attr in attrs:
                    raise CodecError(tok_pos, f"duplicate attribute '{attr}'")
                attrs[attr] = self._str_i()
        children: list = []
        if byte & CONTENT_BIT:
            while True:
                nxt = self._peek()
                if nxt == END:
                    self.i += 1
                    break
                if nxt == STR_I:
                    children.append(self._str_i())
                else:
                    children.append(self.element())
        return _Elem(name, attrs, children, pos)


def decompile_deck(data: bytes) -> WmlDeck:
    """Exact structural inverse of compile_deck on its image."""
    decoder = _Decoder(data)
    version = decoder._byte()
    if version != VERSION:
        raise CodecError(0, f"unsupported version 0x{version:02X}")
    root = decoder.element()
    if decoder.i != len(data):
        raise CodecError(decoder.i, "trailing data after document element")
    try:
        deck = _elem_to_deck(root)
    except StructureError as exc:
        raise CodecError(exc.pos, exc.reason) from None
    violations = wml.validate_deck(deck)
    if violations:
        raise CodecError(0, "; ".join(f"{v.code}({v.detail})" for v in violations))
    return deck
