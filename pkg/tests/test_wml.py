import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deckgen import random_deck
from wapshop.wml import (
    Anchor, Break, Do, Image, Paragraph, ParseError, Text, WmlCard, WmlDeck,
    parse_deck, serialize_deck, validate_deck,
)


def deck_of(*nodes, card_id="a", title=""):
    return WmlDeck((WmlCard(card_id, title, tuple(nodes)),))


class TestParse:
    def test_minimal_deck(self):
        deck = parse_deck('<wml><card id="a"><p>Hi</p></card></wml>')
        assert len(deck.cards) == 1
        assert deck.cards[0].content == (Paragraph((Text("Hi"),)),)

    def test_source_bytes_counts_utf8(self):
        source = '<wml><card id="a"><p>αβγ</p></card></wml>'
        assert parse_deck(source).source_bytes == len(source.encode("utf-8"))

    def test_unclosed_paragraph(self):
        with pytest.raises(ParseError):
            parse_deck('<wml><card id="a"><p>Hi</card></wml>')

    def test_unknown_element_rejected(self):
        with pytest.raises(ParseError) as exc:
            parse_deck('<wml><card id="a"><blink>x</blink></card></wml>')
        assert "blink" in str(exc.value)

    def test_unknown_attribute_rejected(self):
        with pytest.raises(ParseError):
            parse_deck('<wml><card id="a" onenter="x"/></wml>')

    def test_misplaced_element_rejected(self):
        with pytest.raises(ParseError):
            parse_deck('<wml><card id="a"><td>x</td></card></wml>')

    def test_unknown_entity_rejected(self):
        with pytest.raises(ParseError):
            parse_deck('<wml><card id="a"><p>&apos;</p></card></wml>')

    def test_bare_ampersand_rejected(self):
        with pytest.raises(ParseError):
            parse_deck('<wml><card id="a"><p>fish & chips</p></card></wml>')

    def test_known_entities_decode(self):
        deck = parse_deck('<wml><card id="a"><p>&lt;&amp;&gt;&quot;</p></card></wml>')
        assert deck.cards[0].content[0].children[0] == Text('<&>"')

    def test_single_quoted_attribute_rejected(self):
        with pytest.raises(ParseError):
            parse_deck("<wml><card id='a'/></wml>")

    def test_duplicate_attribute_rejected(self):
        with pytest.raises(ParseError):
            parse_deck('<wml><card id="a" id="b"/></wml>')

    def test_trailing_content_rejected(self):
        with pytest.raises(ParseError):
            parse_deck('<wml><card id="a"/></wml><wml><card id="b"/></wml>')

    def test_bom_rejected(self):
        with pytest.raises(ParseError):
            parse_deck('﻿<wml><card id="a"/></wml>')

    def test_mismatched_close_tag(self):
        with pytest.raises(ParseError):
            parse_deck('<wml><card id="a"><p>x</a></card></wml>')

    def test_do_requires_go(self):
        with pytest.raises(ParseError):
            parse_deck('<wml><card id="a"><do type="prev"/></card></wml>')

    def test_bad_do_type(self):
        with pytest.raises(ParseError):
            parse_deck('<wml><card id="a"><do type="reset"><go href="/x"/></do></card></wml>')

    def test_error_position_reported(self):
        source = '<wml><card id="a"><p>ok</p><zap/></card></wml>'
        with pytest.raises(ParseError) as exc:
            parse_deck(source)
        assert exc.value.position == source.index("zap")

    def test_insignificant_whitespace_dropped(self):
        pretty = '<wml>\n  <card id="a">\n    <p>Hi</p>\n  </card>\n</wml>'
        assert parse_deck(pretty) == parse_deck('<wml><card id="a"><p>Hi</p></card></wml>')


class TestSerialize:
    def test_empty_card_self_closes(self):
        assert serialize_deck(WmlDeck((WmlCard("a"),))) == '<wml><card id="a"/></wml>'

    def test_attribute_order_fixed(self):
        deck = deck_of(Image(src="/x.wbmp", alt="pic"), title="T")
        assert serialize_deck(deck) == (
            '<wml><card id="a" title="T"><img src="/x.wbmp" alt="pic"/></card></wml>'
        )

    def test_escaping(self):
        deck = deck_of(Text('a<b&c>"d'))
        text = serialize_deck(deck)
        assert "a&lt;b&amp;c&gt;" in text
        assert parse_deck(text) == deck

    def test_canonical_not_longer_than_pretty_source(self):
        pretty = '<wml>\n  <card id="a" title="T">\n    <p>\n      Hello\n    </p>\n  </card>\n</wml>'
        canon = serialize_deck(parse_deck(pretty))
        assert len(canon.encode()) <= len(pretty.encode())


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_random_decks(seed):
    deck = random_deck(random.Random(seed))
    text = serialize_deck(deck)
    parsed = parse_deck(text)
    assert parsed == deck
    # canonical idempotence
    assert serialize_deck(parsed) == text


class TestValidate:
    def test_duplicate_card_id(self):
        deck = WmlDeck((WmlCard("a"), WmlCard("a")))
        codes = [v.code for v in validate_deck(deck)]
        assert codes == ["DuplicateCardId"]

    def test_dangling_target(self):
        deck = deck_of(Anchor("#missing", "x"))
        violations = validate_deck(deck)
        assert [(v.code, v.detail) for v in violations] == [("DanglingTarget", "missing")]

    def test_fragment_target_resolves(self):
        deck = WmlDeck((WmlCard("a", content=(Anchor("#b", "x"),)), WmlCard("b")))
        assert validate_deck(deck) == []

    def test_empty_deck(self):
        assert [v.code for v in validate_deck(WmlDeck(()))] == ["EmptyDeck"]

    def test_card_id_with_whitespace(self):
        assert [v.code for v in validate_deck(WmlDeck((WmlCard("a b"),)))] == ["BadCardId"]

    def test_empty_image_alt(self):
        deck = deck_of(Image("/x.wbmp", " "))
        assert [v.code for v in validate_deck(deck)] == ["EmptyImageAlt"]

    def test_blank_text(self):
        deck = deck_of(Text("   "))
        assert [v.code for v in validate_deck(deck)] == ["BlankText"]

    def test_bad_do_kind(self):
        deck = deck_of(Do("reset", "x", "/y"))
        assert [v.code for v in validate_deck(deck)] == ["BadDoKind"]

    def test_nested_violations_found_inside_paragraphs(self):
        deck = deck_of(Paragraph((Image("/x.wbmp", ""),)))
        assert [v.code for v in validate_deck(deck)] == ["EmptyImageAlt"]

    def test_random_valid_decks_validate_clean(self):
        rng = random.Random(7)
        for _ in range(100):
            assert validate_deck(random_deck(rng)) == []


def test_structural_equality_ignores_source_bytes():
    built = deck_of(Paragraph((Text("Hi"),)))
    parsed = parse_deck('<wml><card id="a"><p>Hi</p></card></wml>')
    assert parsed.source_bytes > 0 and built.source_bytes == 0
    assert parsed == built
