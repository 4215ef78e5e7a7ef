"""Deck toolchain, usability linter, storefront and gateway simulator."""

from .gateway import (
    AIRTIME_TARIFF, DIALUP, FLAT_TARIFF, WAP_2G, ComparisonReport, Gateway,
    LinkProfile, Tariff, TransferMetrics, airtime_cost, compare_channels,
    simulate_transfer, transfer_metrics,
)
from .lint import (
    LintPolicy, LintReport, LintViolation, SiteGraph, check_navigation,
    crawl_site, lint_deck,
)
from .shop import Store, format_price
from .storefront import Route, SessionRegistry, Storefront, make_route, parse_route
from .wbxml import CodecError, CompiledDeck, InvalidDeck, compile_deck, compiled_size, decompile_deck
from .wml import (
    Anchor, Break, Do, Image, Input, Paragraph, ParseError, Postfield, Select,
    Table, Text, Violation, WmlCard, WmlDeck, parse_deck, serialize_deck,
    validate_deck,
)

__version__ = "0.1.0"
